use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use gaugekit::charges::{FieldSpec, ScalarField, ScalarSpec, VectorField};
use gaugekit::geometry::{BVSet1D, Figure, Region};
use gaugekit::{Error, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn is_file_ref(s: &str) -> bool {
    s.ends_with(".json") || Path::new(s).is_file()
}

/// A catalog name, or a path to a field descriptor.
pub fn vector_field(arg: &str, dim: usize) -> Result<(VectorField, FieldSpec)> {
    let spec = if is_file_ref(arg) {
        read_json(Path::new(arg))?
    } else {
        FieldSpec::Catalog { name: arg.to_string(), dim }
    };
    Ok((spec.build()?, spec))
}

/// A catalog name, a number, or a path to a scalar descriptor.
pub fn scalar_field(arg: &str) -> Result<(ScalarField, ScalarSpec)> {
    let spec = if is_file_ref(arg) {
        read_json(Path::new(arg))?
    } else if let Ok(value) = arg.parse::<f64>() {
        ScalarSpec::Constant { value }
    } else {
        ScalarSpec::Catalog { name: arg.to_string() }
    };
    Ok((spec.build()?, spec))
}

/// A figure file, or a 1D set file (recognised by its `intervals` key).
pub fn region(path: &Path) -> Result<Region> {
    let value: serde_json::Value = read_json(path)?;
    let parsed = if value.get("intervals").is_some() {
        serde_json::from_value::<BVSet1D>(value).map(Region::Line)
    } else {
        serde_json::from_value::<Figure>(value).map(Region::Figure)
    };
    parsed.map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn figure(path: &Path) -> Result<Figure> {
    read_json(path)
}

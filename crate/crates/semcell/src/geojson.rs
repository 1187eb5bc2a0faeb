//! GeoJSON export of map categories. The engine stores `(lat, lon)`;
//! GeoJSON positions are `[lon, lat]`, swapped here and nowhere else.

use semcell_core::geo::MapCategories;
use serde_json::{json, Value};

fn point(lat: f64, lon: f64) -> Value {
    json!({ "type": "Point", "coordinates": [lon, lat] })
}

pub fn map_feature_collection(categories: &MapCategories) -> Value {
    let mut features =
        Vec::with_capacity(categories.red.len() + categories.orange.len() + categories.blue.len());
    for (name, band) in [("red", &categories.red), ("orange", &categories.orange)] {
        for p in band {
            features.push(json!({
                "type": "Feature",
                "geometry": point(p.lat, p.lon),
                "properties": {
                    "category": name,
                    "mesh_i": p.mesh.lat_index,
                    "mesh_j": p.mesh.lon_index,
                    "rank": p.rank,
                    "div": p.div,
                },
            }));
        }
    }
    for p in &categories.blue {
        features.push(json!({
            "type": "Feature",
            "geometry": point(p.lat, p.lon),
            "properties": {
                "category": "blue",
                "mesh_i": p.mesh.lat_index,
                "mesh_j": p.mesh.lon_index,
                "rank": p.rank,
                "chromosome_index": p.chromosome_index,
            },
        }));
    }
    json!({ "type": "FeatureCollection", "features": features })
}

/// Feature counts per category of a validated map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CategoryCounts {
    pub red: usize,
    pub orange: usize,
    pub blue: usize,
}

/// Structural check of an exported map: a FeatureCollection of Point
/// features carrying the category properties.
pub fn validate_map(value: &Value) -> Result<CategoryCounts, String> {
    if value["type"] != "FeatureCollection" {
        return Err("top-level type must be FeatureCollection".into());
    }
    let features = value["features"]
        .as_array()
        .ok_or("features must be an array")?;
    let mut counts = CategoryCounts::default();
    for (i, f) in features.iter().enumerate() {
        let err = |m: &str| format!("feature {i}: {m}");
        if f["type"] != "Feature" {
            return Err(err("type must be Feature"));
        }
        let geom = &f["geometry"];
        if geom["type"] != "Point" {
            return Err(err("geometry must be a Point"));
        }
        let coords = geom["coordinates"]
            .as_array()
            .ok_or_else(|| err("missing coordinates"))?;
        let (Some(lon), Some(lat)) = (
            coords.first().and_then(Value::as_f64),
            coords.get(1).and_then(Value::as_f64),
        ) else {
            return Err(err("coordinates must be two numbers"));
        };
        if coords.len() != 2 || !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
            return Err(err("coordinates out of range or not [lon, lat]"));
        }
        let props = f["properties"]
            .as_object()
            .ok_or_else(|| err("missing properties"))?;
        if !props.get("mesh_i").is_some_and(Value::is_i64)
            || !props.get("mesh_j").is_some_and(Value::is_i64)
        {
            return Err(err("mesh_i and mesh_j must be integers"));
        }
        match props.get("category").and_then(Value::as_str) {
            Some(c @ ("red" | "orange")) => {
                if !props.get("div").is_some_and(Value::is_number) {
                    return Err(err("ranked features need a numeric div"));
                }
                if c == "red" {
                    counts.red += 1;
                } else {
                    counts.orange += 1;
                }
            }
            Some("blue") => {
                if !props.get("chromosome_index").is_some_and(Value::is_u64) {
                    return Err(err("blue features need an integer chromosome_index"));
                }
                counts.blue += 1;
            }
            _ => return Err(err("category must be red, orange or blue")),
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use semcell_core::geo::{ChromosomePoint, MeshId, RankedPoint};

    fn sample() -> MapCategories {
        let m = MeshId::new(75, 283);
        MapCategories {
            red: vec![RankedPoint {
                mesh: m,
                rank: 1,
                div: 0.25,
                lat: 37.7,
                lon: 141.8,
            }],
            orange: vec![],
            blue: vec![ChromosomePoint {
                mesh: m,
                rank: 1,
                chromosome_index: 0,
                lat: 37.0,
                lon: 140.0,
            }],
            shrunk: false,
        }
    }

    #[test]
    fn coordinates_are_lon_lat() {
        let v = map_feature_collection(&sample());
        assert_eq!(
            v["features"][0]["geometry"]["coordinates"],
            json!([141.8, 37.7])
        );
        assert_eq!(
            v["features"][1]["geometry"]["coordinates"],
            json!([140.0, 37.0])
        );
        assert_eq!(v["features"][0]["properties"]["mesh_i"], 75);
        assert_eq!(v["features"][1]["properties"]["chromosome_index"], 0);
    }

    #[test]
    fn validation() {
        let v = map_feature_collection(&sample());
        assert_eq!(
            validate_map(&v),
            Ok(CategoryCounts {
                red: 1,
                orange: 0,
                blue: 1
            })
        );
        let mut bad = v.clone();
        bad["features"][0]["properties"]["category"] = json!("green");
        assert!(validate_map(&bad).is_err());
        let mut bad = v.clone();
        bad["features"][1]["properties"]
            .as_object_mut()
            .unwrap()
            .remove("chromosome_index");
        assert!(validate_map(&bad).is_err());
        let mut bad = v;
        bad["features"][0]["geometry"]["coordinates"] = json!([37.7, 241.8]);
        assert!(validate_map(&bad).is_err());
        assert!(validate_map(&json!({"type": "Feature"})).is_err());
    }
}

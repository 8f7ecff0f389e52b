//! JSON schemas of every input file, printed by `--schema`.

use serde_json::{json, Value};

fn scalar() -> Value {
    json!({
        "description": "exact rational: a JSON integer, a decimal literal, or a string \"p/q\"",
        "anyOf": [{ "type": "number" }, { "type": "string", "pattern": "^[+-]?[0-9]+(/[0-9]+|(\\.[0-9]*)?([eE][+-]?[0-9]+)?)$" }]
    })
}

fn point() -> Value {
    json!({ "type": "array", "items": { "$ref": "#/$defs/scalar" } })
}

fn region() -> Value {
    let r = json!({ "$ref": "#/$defs/region" });
    let p = json!({ "$ref": "#/$defs/point" });
    let s = json!({ "$ref": "#/$defs/scalar" });
    let kind = |k: &str, props: Value, req: &[&str]| {
        let mut props = props;
        props["kind"] = json!({ "const": k });
        let mut required = vec!["kind"];
        required.extend_from_slice(req);
        json!({ "type": "object", "properties": props, "required": required })
    };
    json!({
        "description": "open region of R^D; coordinates are 0-based",
        "oneOf": [
            kind("open_ball", json!({ "center": p, "radius": s }), &["center", "radius"]),
            kind("closed_ball", json!({ "center": p, "radius": s }), &["center", "radius"]),
            kind("half_space", json!({ "normal": p, "offset": s, "closed": { "type": "boolean" } }), &["normal", "offset"]),
            kind("affine_subspace", json!({ "normals": { "type": "array", "items": p }, "offsets": { "type": "array", "items": s } }), &["normals", "offsets"]),
            kind("coordinate_plane_complement", json!({ "i": { "type": "integer" }, "j": { "type": "integer" } }), &["i", "j"]),
            kind("translate", json!({ "region": r, "by": p }), &["region", "by"]),
            kind("full_space", json!({}), &[]),
            kind("empty", json!({}), &[]),
            kind("intersection", json!({ "regions": { "type": "array", "items": r } }), &["regions"]),
            kind("union", json!({ "regions": { "type": "array", "items": r } }), &["regions"]),
            kind("complement", json!({ "region": r }), &["region"])
        ]
    })
}

fn model() -> Value {
    json!({
        "type": "object",
        "description": "filtered space: carrier M, chain of coordinate steps E_alpha",
        "properties": {
            "filtration": {
                "type": "object",
                "properties": {
                    "ambient_dim": { "type": "integer" },
                    "steps": { "type": "array", "items": {
                        "type": "object",
                        "properties": { "index": { "type": "integer" }, "coords": { "type": "array", "items": { "type": "integer" } } },
                        "required": ["index", "coords"]
                    } }
                },
                "required": ["ambient_dim", "steps"]
            },
            "carrier": { "$ref": "#/$defs/region" },
            "density_radius": { "$ref": "#/$defs/scalar" },
            "sample_box": { "type": ["array", "null"], "items": { "$ref": "#/$defs/point" }, "minItems": 2, "maxItems": 2 },
            "max_radius": { "$ref": "#/$defs/scalar" }
        },
        "required": ["filtration", "carrier", "density_radius"]
    })
}

fn complex() -> Value {
    json!({
        "type": "object",
        "description": "vertex table and maximal simplices as vertex index tuples",
        "properties": {
            "vertices": { "type": "array", "items": { "$ref": "#/$defs/point" } },
            "simplices": { "type": "array", "items": { "type": "array", "items": { "type": "integer" } } }
        },
        "required": ["vertices", "simplices"]
    })
}

fn pl_map() -> Value {
    let mut c = complex();
    c["description"] = json!("PL map: a complex plus one value per vertex");
    c["properties"]["values"] = json!({ "type": "array", "items": { "$ref": "#/$defs/point" } });
    c["required"] = json!(["vertices", "simplices", "values"]);
    c
}

fn loop_model() -> Value {
    json!({
        "type": "object",
        "description": "closed polygon, first point equal to the last; axis = the two coordinates of the removed plane",
        "properties": {
            "points": { "type": "array", "items": { "$ref": "#/$defs/point" } },
            "axis": { "type": "array", "items": { "type": "integer" }, "minItems": 2, "maxItems": 2 }
        },
        "required": ["points", "axis"]
    })
}

fn sample_graph() -> Value {
    json!({
        "type": "object",
        "properties": {
            "points": { "type": "array", "items": { "$ref": "#/$defs/point" } },
            "edges": { "type": "array", "items": { "type": "array", "items": { "type": "integer" }, "minItems": 2, "maxItems": 2 } }
        },
        "required": ["points", "edges"]
    })
}

fn defs() -> Value {
    json!({
        "scalar": scalar(),
        "point": point(),
        "region": region(),
        "model": model(),
        "loop": loop_model(),
        "sample_graph": sample_graph()
    })
}

fn document(title: &str, body: Value) -> Value {
    let mut doc = body;
    doc["$schema"] = json!("https://json-schema.org/draft/2020-12/schema");
    doc["title"] = json!(title);
    doc["$defs"] = defs();
    doc
}

/// `(name, schema)` for every input file kind.
pub fn schemas() -> Vec<(&'static str, Value)> {
    let list = |item: Value| json!({ "type": "array", "items": item });
    vec![
        ("complex", document("complex", complex())),
        (
            "simplex",
            document(
                "simplex",
                json!({
                    "type": "object",
                    "properties": { "vertices": list(json!({ "$ref": "#/$defs/point" })) },
                    "required": ["vertices"]
                }),
            ),
        ),
        ("pl-map", document("pl-map", pl_map())),
        (
            "map-values",
            document(
                "map-values",
                json!({
                    "type": "object",
                    "description": "vertex values of a map on a complex given in another file",
                    "properties": { "values": list(json!({ "$ref": "#/$defs/point" })) },
                    "required": ["values"]
                }),
            ),
        ),
        (
            "points",
            document("points", list(json!({ "$ref": "#/$defs/point" }))),
        ),
        (
            "set-system",
            document(
                "set-system",
                json!({
                    "type": "object",
                    "description": "direct system of finite sets; the order is the reflexive-transitive closure of the bonding maps",
                    "properties": {
                        "objects": list(json!({ "type": "array", "prefixItems": [{ "type": "string" }, list(json!({ "type": "string" }))] })),
                        "bonding": list(json!({
                            "type": "object",
                            "properties": { "from": { "type": "string" }, "to": { "type": "string" }, "map": list(json!({ "type": "integer" })) },
                            "required": ["from", "to", "map"]
                        }))
                    },
                    "required": ["objects", "bonding"]
                }),
            ),
        ),
        (
            "cone",
            document(
                "cone",
                json!({
                    "type": "object",
                    "description": "compatible maps from every object of a system into one target set",
                    "properties": {
                        "target": list(json!({ "type": "string" })),
                        "maps": list(list(json!({ "type": "integer" })))
                    },
                    "required": ["target", "maps"]
                }),
            ),
        ),
        (
            "region",
            document("region", json!({ "$ref": "#/$defs/region" })),
        ),
        (
            "model",
            document("model", json!({ "$ref": "#/$defs/model" })),
        ),
        (
            "chart",
            document(
                "chart",
                json!({
                    "type": "object",
                    "description": "translation chart from U = V + translation onto the convex region V",
                    "properties": {
                        "translation": { "$ref": "#/$defs/point" },
                        "image": { "$ref": "#/$defs/region" },
                        "core": { "$ref": "#/$defs/region" },
                        "quarter": { "$ref": "#/$defs/region" },
                        "alpha0": { "type": "integer" }
                    },
                    "required": ["translation", "image", "alpha0"]
                }),
            ),
        ),
        (
            "neighborhood",
            document(
                "neighborhood",
                json!({
                    "type": "object",
                    "description": "intersection of constraints [K, W]: K is a set of simplex indices of the domain or a point list",
                    "properties": {
                        "constraints": list(json!({
                            "type": "object",
                            "properties": {
                                "simplices": list(json!({ "type": "integer" })),
                                "points": list(json!({ "$ref": "#/$defs/point" })),
                                "region": { "$ref": "#/$defs/region" }
                            },
                            "required": ["region"]
                        }))
                    },
                    "required": ["constraints"]
                }),
            ),
        ),
        (
            "carrier",
            document(
                "carrier",
                json!({
                    "type": "object",
                    "description": "face-closed set of simplex indices of the domain complex",
                    "properties": { "simplices": list(json!({ "type": "integer" })) },
                    "required": ["simplices"]
                }),
            ),
        ),
        (
            "loops",
            document("loops", list(json!({ "$ref": "#/$defs/loop" }))),
        ),
        (
            "component-model",
            document(
                "component-model",
                json!({
                    "type": "object",
                    "properties": {
                        "space": { "$ref": "#/$defs/model" },
                        "steps": list(json!({ "type": "array", "prefixItems": [{ "type": "integer" }, { "$ref": "#/$defs/sample_graph" }] })),
                        "ambient": { "$ref": "#/$defs/sample_graph" },
                        "basepoint": { "$ref": "#/$defs/point" }
                    },
                    "required": ["space", "steps", "ambient", "basepoint"]
                }),
            ),
        ),
        (
            "palais-input",
            document(
                "palais-input",
                json!({
                    "type": "object",
                    "description": "ambient points (the first is the basepoint), ambient loops and step loops",
                    "properties": {
                        "points": list(json!({ "$ref": "#/$defs/point" })),
                        "loops": list(json!({ "$ref": "#/$defs/loop" })),
                        "step_loops": list(json!({ "$ref": "#/$defs/loop" }))
                    },
                    "required": ["points", "loops"]
                }),
            ),
        ),
    ]
}

//! Model file format: a single JSON document with nested tree nodes.
//!
//! serde_json writes f64 with shortest-round-trip formatting, so
//! load(save(m)) reproduces predictions bit-exactly.

use serde::{Deserialize, Serialize};

use super::tree::{Node, RegressionTree};
use super::{BoostedEnsemble, GbdtError, Objective};

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeJson {
    Internal {
        feature: usize,
        bin_threshold: u16,
        left: Box<NodeJson>,
        right: Box<NodeJson>,
    },
    Leaf {
        leaf_value: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    format_version: u32,
    objective: String,
    num_class: usize,
    base_score: Vec<f64>,
    learning_rate: f64,
    bin_boundaries: Vec<Vec<f64>>,
    trees: Vec<NodeJson>,
}

fn to_nested(tree: &RegressionTree, idx: usize) -> NodeJson {
    match &tree.nodes[idx] {
        Node::Leaf { leaf_value } => NodeJson::Leaf { leaf_value: *leaf_value },
        Node::Internal { feature, bin_threshold, left, right } => NodeJson::Internal {
            feature: *feature,
            bin_threshold: *bin_threshold,
            left: Box::new(to_nested(tree, *left)),
            right: Box::new(to_nested(tree, *right)),
        },
    }
}

fn from_nested(node: &NodeJson, nodes: &mut Vec<Node>) -> usize {
    let slot = nodes.len();
    nodes.push(Node::Leaf { leaf_value: 0.0 });
    match node {
        NodeJson::Leaf { leaf_value } => {
            nodes[slot] = Node::Leaf { leaf_value: *leaf_value };
        }
        NodeJson::Internal { feature, bin_threshold, left, right } => {
            let l = from_nested(left, nodes);
            let r = from_nested(right, nodes);
            nodes[slot] = Node::Internal {
                feature: *feature,
                bin_threshold: *bin_threshold,
                left: l,
                right: r,
            };
        }
    }
    slot
}

pub fn to_json(model: &BoostedEnsemble) -> String {
    let (objective, num_class) = match model.objective {
        Objective::Binary => ("binary".to_string(), 1),
        Objective::Multiclass { num_class } => ("multiclass".to_string(), num_class),
    };
    let doc = ModelJson {
        format_version: FORMAT_VERSION,
        objective,
        num_class,
        base_score: model.base_score.clone(),
        learning_rate: model.learning_rate,
        bin_boundaries: model.bin_boundaries.clone(),
        trees: model.trees.iter().map(|t| to_nested(t, 0)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<BoostedEnsemble, GbdtError> {
    let doc: ModelJson =
        serde_json::from_str(text).map_err(|e| GbdtError::BadModelFile(e.to_string()))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(GbdtError::BadModelFile(format!(
            "unsupported format_version {}",
            doc.format_version
        )));
    }
    let objective = match doc.objective.as_str() {
        "binary" => Objective::Binary,
        "multiclass" => Objective::Multiclass { num_class: doc.num_class },
        other => return Err(GbdtError::BadModelFile(format!("unknown objective `{other}`"))),
    };
    let trees = doc
        .trees
        .iter()
        .map(|root| {
            let mut nodes = Vec::new();
            from_nested(root, &mut nodes);
            RegressionTree { nodes }
        })
        .collect();
    Ok(BoostedEnsemble {
        objective,
        base_score: doc.base_score,
        learning_rate: doc.learning_rate,
        bin_boundaries: doc.bin_boundaries,
        trees,
    })
}

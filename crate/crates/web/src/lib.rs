//! Browser bindings for the hyperkube demo page.
//!
//! Each operation has a plain Rust function returning a JSON string, which the
//! `#[wasm_bindgen]` wrapper forwards to JavaScript with errors as strings.

use hyperkube::keyword::{Dimension, KeywordSet, NodeId};
use hyperkube::routing::greedy_path;
use hyperkube::sim::{run_cell, ExperimentConfig, SearchKind};
use hyperkube::topology::SubHypercube;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest dimension the page will simulate; keeps a cell under a second.
pub const MAX_DEMO_DIMENSION: u32 = 13;

#[derive(Serialize)]
struct Placement {
    keyword: String,
    position: u8,
}

#[derive(Serialize)]
struct Route {
    r: u32,
    keywords: Vec<Placement>,
    start: NodeId,
    responsible: NodeId,
    path: Vec<NodeId>,
    hops: usize,
}

#[derive(Serialize)]
struct Tree {
    root: NodeId,
    free_positions: Vec<u32>,
    /// Members in depth-first visiting order.
    order: Vec<NodeId>,
    /// `(parent, child)` tree edges.
    edges: Vec<(NodeId, NodeId)>,
}

#[derive(Serialize)]
struct Cell {
    r: u32,
    objects: usize,
    search: SearchKind,
    mean: f64,
    stddev: f64,
    ci_low: f64,
    ci_high: f64,
    routing: f64,
    traversal: f64,
    repetitions: Vec<f64>,
}

fn dimension(r: u32) -> Result<Dimension, String> {
    Dimension::new(r).map_err(|e| e.to_string())
}

fn node(text: &str, r: Dimension) -> Result<NodeId, String> {
    let id = NodeId::parse(text.trim()).map_err(|e| e.to_string())?;
    if id.dim() != r {
        return Err(format!("node {id} has {} bits, expected {r}", id.dim()));
    }
    Ok(id)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Greedy route from `start` to the node responsible for the comma-separated
/// `keywords`.
pub fn route_json(keywords: &str, r: u32, start: &str) -> Result<String, String> {
    let r = dimension(r)?;
    let set = KeywordSet::parse(keywords.split(',').filter(|w| !w.trim().is_empty())).map_err(|e| e.to_string())?;
    let start = node(start, r)?;
    let responsible = set.node_id(r);
    let path = greedy_path(start, responsible);
    to_json(&Route {
        r: r.get(),
        keywords: set
            .iter()
            .map(|k| Placement {
                keyword: k.as_str().to_owned(),
                position: k.position(r),
            })
            .collect(),
        start,
        responsible,
        hops: path.len() - 1,
        path,
    })
}

/// Spanning binomial tree of the sub-hypercube rooted at `root`.
pub fn spanning_tree_json(root: &str) -> Result<String, String> {
    let root = NodeId::parse(root.trim()).map_err(|e| e.to_string())?;
    let sub = SubHypercube::new(root);
    let order: Vec<NodeId> = sub.dfs().collect();
    let mut edges = Vec::with_capacity(order.len().saturating_sub(1));
    for &v in &order {
        for c in sub.sbt_children(v).map_err(|e| e.to_string())? {
            edges.push((v, c));
        }
    }
    to_json(&Tree {
        root,
        free_positions: sub.free_positions().to_vec(),
        order,
        edges,
    })
}

/// One experiment cell with default workload settings.
pub fn experiment_json(r: u32, objects: usize, search: &str, reps: usize, seed: u64) -> Result<String, String> {
    if r > MAX_DEMO_DIMENSION {
        return Err(format!("r must be at most {MAX_DEMO_DIMENSION} in the browser"));
    }
    let search: SearchKind = search.parse()?;
    let mut config = ExperimentConfig::new(dimension(r)?, objects, search);
    config.repetitions = reps;
    config.seed = seed;
    config.validate().map_err(|e| e.to_string())?;
    let cell = run_cell(&config).map_err(|e| e.to_string())?;
    to_json(&Cell {
        r,
        objects,
        search,
        mean: cell.total.mean,
        stddev: cell.total.stddev,
        ci_low: cell.total.ci_low,
        ci_high: cell.total.ci_high,
        routing: cell.routing.mean,
        traversal: cell.traversal.mean,
        repetitions: cell.rows().map(|row| row.mean_hops).collect(),
    })
}

#[wasm_bindgen(js_name = route)]
pub fn route(keywords: &str, r: u32, start: &str) -> Result<String, JsValue> {
    route_json(keywords, r, start).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = spanningTree)]
pub fn spanning_tree(root: &str) -> Result<String, JsValue> {
    spanning_tree_json(root).map_err(|e| JsValue::from_str(&e))
}

/// The seed is a plain JS number here rather than a BigInt.
#[wasm_bindgen(js_name = experiment)]
pub fn experiment(r: u32, objects: usize, search: &str, reps: usize, seed: u32) -> Result<String, JsValue> {
    experiment_json(r, objects, search, reps, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

//! Built-in example geometries.

use crate::error::{Error, Result};
use crate::lattice::StackyFan;

/// A fan with a default brane flag `(i1, i2, i3)` (0-based) and framing.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub fan: StackyFan,
    pub order: [usize; 3],
    pub framing: Vec<i64>,
}

pub const NAMES: [&str; 7] = ["c3", "x111", "x120", "x012", "x000", "conifold", "kp2"];

pub fn example(name: &str) -> Result<Example> {
    let (summary, torsion, rays, extras, cones, order, framing): (
        &'static str,
        Vec<i64>,
        Vec<Vec<i64>>,
        Vec<Vec<i64>>,
        Vec<[usize; 3]>,
        [usize; 3],
        Vec<i64>,
    ) = match name {
        "c3" => (
            "C^3, outer brane",
            vec![],
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1]],
            vec![],
            vec![[0, 1, 2]],
            [0, 1, 2],
            vec![0],
        ),
        "x111" => (
            "[C^3/Z_3], weights (1,1,1), s1 = 3",
            vec![],
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]],
            vec![vec![0, 0, 1]],
            vec![[0, 1, 2]],
            [0, 1, 2],
            vec![0],
        ),
        "x120" => (
            "[C^2/Z_3] x C, weights (1,2,0) along the flag (2,3,1), s1 = 3",
            vec![],
            a2_rays(),
            a2_extras(),
            vec![[0, 1, 2]],
            [1, 2, 0],
            vec![0],
        ),
        "x012" => (
            "[C^2/Z_3] x C, weights (0,1,2) along the flag (1,2,3), s1 = 1",
            vec![],
            a2_rays(),
            a2_extras(),
            vec![[0, 1, 2]],
            [0, 1, 2],
            vec![0],
        ),
        "x000" => (
            "C^3 x BZ_3 (torsion), outer brane",
            vec![3],
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]],
            vec![vec![1, 0, 0, 1]],
            vec![[0, 1, 2]],
            [0, 1, 2],
            vec![0],
        ),
        "conifold" => (
            "resolved conifold, inner brane on the compact curve, flag (1,3,4)",
            vec![],
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 1], vec![1, 1, 1]],
            vec![],
            vec![[0, 2, 3], [1, 2, 3]],
            [0, 2, 3],
            vec![0, 0],
        ),
        "kp2" => (
            "local P^2, outer brane, flag (4,1,2)",
            vec![],
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1], vec![0, 0, 1]],
            vec![],
            vec![[0, 1, 3], [1, 2, 3], [0, 2, 3]],
            [3, 0, 1],
            vec![0],
        ),
        other => {
            return Err(Error::Input(format!(
                "unknown example {other:?}; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    let fan = StackyFan::new(torsion, rays, extras, cones)?;
    Ok(Example {
        name: NAMES.iter().find(|n| **n == name).unwrap(),
        summary,
        fan,
        order,
        framing,
    })
}

fn a2_rays() -> Vec<Vec<i64>> {
    vec![vec![1, 0, 1], vec![0, 3, 1], vec![0, 0, 1]]
}

fn a2_extras() -> Vec<Vec<i64>> {
    vec![vec![0, 1, 1], vec![0, 2, 1]]
}

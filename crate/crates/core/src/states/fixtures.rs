//! Named causal states.
//!
//! Unfaithful and non-minimal states are built by exact parameter
//! cancellation; random parameterizations essentially never produce them.

use serde::Serialize;

use crate::distributions::{CausalState, CptNetwork, VariableSet};
use crate::graphs::Dag;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub network: CptNetwork,
}

impl Fixture {
    pub fn k(&self) -> usize {
        self.network.dag().k()
    }

    pub fn state(&self) -> CausalState {
        CausalState::from_network(&self.network)
    }
}

fn bern(p: f64) -> Vec<f64> {
    vec![1.0 - p, p]
}

fn binary_net(k: usize, edges: &[(usize, usize)], cpts: Vec<Vec<Vec<f64>>>) -> CptNetwork {
    CptNetwork::new(
        Dag::new(k, edges).expect("fixture graph"),
        VariableSet::binary(k),
        cpts,
    )
    .expect("fixture CPTs")
}

/// `x_c = x_a XOR x_b` with flip probability `noise`, fair parents `a < b`.
fn noisy_xor_collider(a: usize, b: usize, c: usize, noise: f64) -> CptNetwork {
    let mut cpts = vec![Vec::new(); 3];
    cpts[a] = vec![bern(0.5)];
    cpts[b] = vec![bern(0.5)];
    // parent rows (x_a, x_b) = 00, 01, 10, 11
    cpts[c] = vec![
        bern(noise),
        bern(1.0 - noise),
        bern(1.0 - noise),
        bern(noise),
    ];
    binary_net(3, &[(a, c), (b, c)], cpts)
}

pub fn generic_chain() -> Fixture {
    Fixture {
        name: "generic_chain",
        description: "0→1→2 with generic CPTs; faithful",
        network: binary_net(
            3,
            &[(0, 1), (1, 2)],
            vec![
                vec![bern(0.4)],
                vec![bern(0.2), bern(0.85)],
                vec![bern(0.3), bern(0.95)],
            ],
        ),
    }
}

pub fn generic_collider() -> Fixture {
    Fixture {
        name: "generic_collider",
        description: "0→2←1 with generic CPTs; faithful",
        network: binary_net(
            3,
            &[(0, 2), (1, 2)],
            vec![
                vec![bern(0.45)],
                vec![bern(0.55)],
                vec![bern(0.95), bern(0.05), bern(0.7), bern(0.95)],
            ],
        ),
    }
}

pub fn degenerate_edge() -> Fixture {
    Fixture {
        name: "degenerate_edge",
        description:
            "0→1 with identical CPT rows; unfaithful and non-minimal (the empty graph fits)",
        network: binary_net(
            2,
            &[(0, 1)],
            vec![vec![bern(0.4)], vec![bern(0.3), bern(0.3)]],
        ),
    }
}

pub fn cancellation_collider() -> Fixture {
    Fixture {
        name: "cancellation_collider",
        description:
            "0→2←1 with X2 a noisy XOR of fair parents; every pair is marginally independent. \
                      Minimal but not u-minimal, unfaithful, not quasi-faithful",
        network: noisy_xor_collider(0, 1, 2, 0.05),
    }
}

pub fn cancellation_collider_swapped() -> Fixture {
    Fixture {
        name: "cancellation_collider_swapped",
        description: "0→1←2 carrying the same noisy-XOR distribution as cancellation_collider",
        network: noisy_xor_collider(0, 2, 1, 0.05),
    }
}

pub fn cancellation_triangle() -> Fixture {
    // P(X2=1 | X0=x0) = Σ_x1 P(x1|x0) q(x0,x1) = 0.26 for both x0, so 0 ⟂ 2.
    Fixture {
        name: "cancellation_triangle",
        description: "complete DAG 0→1→2, 0→2 whose two paths cancel so 0 ⟂ 2; \
                      non-minimal (the collider 0→1←2 fits), quasi-faithful",
        network: binary_net(
            3,
            &[(0, 1), (0, 2), (1, 2)],
            vec![
                vec![bern(0.5)],
                vec![bern(0.2), bern(0.8)],
                vec![bern(0.1), bern(0.9), bern(0.5), bern(0.2)],
            ],
        ),
    }
}

pub fn uniform_empty() -> Fixture {
    Fixture {
        name: "uniform_empty",
        description: "empty graph on two fair independent coins; faithful",
        network: binary_net(2, &[], vec![vec![bern(0.5)], vec![bern(0.5)]]),
    }
}

pub fn point_mass() -> Fixture {
    Fixture {
        name: "point_mass",
        description: "empty graph with all mass on cell 00; every statement holds",
        network: binary_net(2, &[], vec![vec![bern(0.0)], vec![bern(0.0)]]),
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        generic_chain(),
        generic_collider(),
        degenerate_edge(),
        cancellation_collider(),
        cancellation_collider_swapped(),
        cancellation_triangle(),
        uniform_empty(),
        point_mass(),
    ]
}

pub fn fixture_names() -> Vec<&'static str> {
    fixtures().iter().map(|f| f.name).collect()
}

pub fn fixture(name: &str) -> Result<Fixture> {
    fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

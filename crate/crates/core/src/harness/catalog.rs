use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HybridParams, ModelSpec};

/// Standard parametrisation `(mu, a, b) = (1, 1/20, 100/20)`.
pub const STANDARD_MU: f64 = 1.0;
pub const STANDARD_A: f64 = 1.0 / 20.0;
pub const STANDARD_B: f64 = 100.0 / 20.0;

/// One of the six Hybrid structures used in the sensitivity study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatalogModel {
    pub id: u8,
    pub n1: usize,
    pub n2: usize,
}

impl CatalogModel {
    pub fn dim(&self) -> usize {
        (self.n1 - 1) * self.n2 + 1
    }

    pub fn spec(&self, mu: f64, a: f64, b: f64) -> Result<ModelSpec> {
        ModelSpec::hybrid(HybridParams::uniform(mu, a, b, self.n1, self.n2))
    }

    pub fn standard_spec(&self) -> Result<ModelSpec> {
        self.spec(STANDARD_MU, STANDARD_A, STANDARD_B)
    }
}

/// Models 1-6 as `(id, n2, n1, expected dimension)`.
const MODELS: [(u8, usize, usize, usize); 6] =
    [(1, 1, 2, 2), (2, 2, 2, 3), (3, 1, 3, 3), (4, 4, 2, 5), (5, 1, 5, 5), (6, 2, 3, 5)];

pub struct ModelCatalog;

impl ModelCatalog {
    pub fn all() -> Vec<CatalogModel> {
        MODELS
            .iter()
            .map(|&(id, n2, n1, dim)| {
                let m = CatalogModel { id, n1, n2 };
                assert_eq!(m.dim(), dim, "catalog dimension rule violated for model {id}");
                m
            })
            .collect()
    }

    pub fn get(id: u8) -> Result<CatalogModel> {
        Self::all()
            .into_iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown catalog model {id}; expected 1-6")))
    }
}

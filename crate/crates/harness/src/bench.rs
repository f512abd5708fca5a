//! Label-size sweeps: prove on generated instances of growing size and
//! compare the largest label to `log2 n`.

use lanecert::certification::{label_size_stats, prove_with_witness, ProveError};
use lanecert::homomorphism::Property;
use serde::Serialize;
use thiserror::Error;

use crate::generate::{generate, Family, GenError, GeneratorSpec};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("n = {n}: {source}")]
    Prove { n: usize, source: ProveError },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub max_bits: usize,
    pub mean_bits: f64,
    pub max_routes: usize,
    pub lanes: usize,
    /// `max_bits / log2 n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub family: String,
    pub property: String,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    /// Largest ratio over the smallest; 1.0 means a perfectly flat sweep.
    pub fn spread(&self) -> f64 {
        let ratios = self.rows.iter().map(|r| r.ratio);
        let max = ratios.clone().fold(f64::MIN, f64::max);
        let min = ratios.fold(f64::MAX, f64::min);
        if self.rows.is_empty() { 1.0 } else { max / min }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,max_bits,mean_bits,max_routes,lanes,ratio\n");
        for r in &self.rows {
            s += &format!("{},{},{:.2},{},{},{:.3}\n", r.n, r.max_bits, r.mean_bits, r.max_routes, r.lanes, r.ratio);
        }
        s
    }
}

pub fn bench_label_size(family: Family, sizes: &[usize], property: Property, k: usize, seed: u64) -> Result<BenchTable, BenchError> {
    let rows = sizes
        .iter()
        .map(|&n| {
            let inst = generate(GeneratorSpec { family, n, seed })?;
            let ir = inst.witness.intervals().map_err(GenError::from)?;
            let proof = prove_with_witness(&inst.graph, property, k, Some(&ir)).map_err(|source| BenchError::Prove { n, source })?;
            let st = label_size_stats(&proof.labels.labels).expect("prover output decodes");
            Ok(BenchRow {
                n,
                max_bits: st.max_bits,
                mean_bits: st.mean_bits,
                max_routes: st.max_routes,
                lanes: proof.stats.lanes,
                ratio: st.max_bits as f64 / (n as f64).log2(),
            })
        })
        .collect::<Result<_, BenchError>>()?;
    Ok(BenchTable { family: family.to_string(), property: property.name().to_string(), k, seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_has_finite_sizes() {
        let t = bench_label_size(Family::Cycle, &[4], Property::Bipartite, 2, 0).unwrap();
        assert!(t.rows[0].max_bits > 0);
        assert!(t.rows[0].ratio.is_finite());
    }

    #[test]
    fn small_sweep_stays_flat() {
        let t = bench_label_size(Family::Path, &[100, 1000], Property::Bipartite, 2, 0).unwrap();
        assert!(t.spread() <= 1.25, "{}", t.to_csv());
        assert_eq!(t.to_csv().lines().count(), 3);
    }

    #[test]
    fn failing_property_is_reported_with_its_size() {
        let err = bench_label_size(Family::Cycle, &[9], Property::Bipartite, 2, 0).unwrap_err();
        assert!(matches!(err, BenchError::Prove { n: 9, source: ProveError::PropertyFails }));
    }
}

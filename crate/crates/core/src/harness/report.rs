use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{Format, ParamValue};

pub const SCHEMA_VERSION: u32 = 1;

/// A sweep point: one entry per declared sweep parameter, `None` where the
/// metric does not depend on it.
pub type SweepPoint = Vec<Option<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub point: SweepPoint,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub index: u64,
    pub seed: u64,
    /// `None` on success, else the failure message.
    pub error: Option<String>,
    pub steps: u64,
    pub metrics: Vec<MetricValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub point: SweepPoint,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub n_replicas: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryValue {
    pub point: SweepPoint,
    pub metric: String,
    pub value: f64,
    pub law: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub stderr: f64,
    pub replicas: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub law: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveOut {
    pub label: String,
    pub x_name: String,
    pub y_name: String,
    pub points: Vec<CurvePoint>,
    pub theory: Option<Overlay>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub experiment: String,
    pub master_seed: u64,
    pub replicas: u64,
    pub params: BTreeMap<String, ParamValue>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accounting {
    pub total_steps: u64,
    pub failed_replicas: u64,
}

/// Run-dependent measurements kept apart from the reproducible content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub sweep: Vec<String>,
    pub records: Vec<ReplicaRecord>,
    pub aggregates: Vec<Aggregate>,
    pub theory: Vec<TheoryValue>,
    pub curves: Vec<CurveOut>,
    pub notes: Vec<String>,
    pub accounting: Accounting,
    pub timing: Timing,
}

fn point_key(p: &SweepPoint) -> Vec<Option<u64>> {
    p.iter().map(|v| v.map(f64::to_bits)).collect()
}

/// Mean, standard error and count per `(point, metric)` over successful
/// records, in order of first appearance.
pub fn aggregate_records(records: &[ReplicaRecord]) -> Vec<Aggregate> {
    let mut order: Vec<(SweepPoint, String)> = Vec::new();
    let mut values: BTreeMap<(Vec<Option<u64>>, String), Vec<f64>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.error.is_none()) {
        for m in &rec.metrics {
            let key = (point_key(&m.point), m.metric.clone());
            let slot = values.entry(key).or_default();
            if slot.is_empty() {
                order.push((m.point.clone(), m.metric.clone()));
            }
            slot.push(m.value);
        }
    }
    order
        .into_iter()
        .map(|(point, metric)| {
            let xs = &values[&(point_key(&point), metric.clone())];
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let stderr = (xs.len() > 1)
                .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt());
            Aggregate { point, metric, value: mean, stderr, n_replicas: xs.len() as u64 }
        })
        .collect()
}

impl Report {
    /// JSON of the whole report, timing included.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the `timing` section; identical across runs with the
    /// same configuration.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn aggregate(&self, metric: &str, point: &[Option<f64>]) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.metric == metric && point_key(&a.point) == point_key(&point.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(index: u64, v: f64, failed: bool) -> ReplicaRecord {
        ReplicaRecord {
            index,
            seed: index,
            error: failed.then(|| "x".to_string()),
            steps: 1,
            metrics: vec![
                MetricValue { point: vec![Some(0.1)], metric: "m".into(), value: v },
                MetricValue { point: vec![None], metric: "k".into(), value: 2.0 * v },
            ],
        }
    }

    #[test]
    fn aggregates_skip_failures() {
        let recs = vec![rec(0, 1.0, false), rec(1, 3.0, false), rec(2, 100.0, true)];
        let agg = aggregate_records(&recs);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].metric, "m");
        assert_eq!(agg[0].value, 2.0);
        assert_eq!(agg[0].n_replicas, 2);
        assert!((agg[0].stderr.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(agg[1].value, 4.0);
        let single = aggregate_records(&recs[..1]);
        assert_eq!(single[0].stderr, None);
    }
}

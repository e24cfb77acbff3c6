//! Topic-label alignment.
//!
//! For a topic (cluster) `t` and class set `C`,
//! `align(t) = max_c |t ∩ c| / |t|`. The corpus-level score weights each
//! topic by its share of documents, `avg_align = Σ_t (|t| / M) · align(t)`,
//! which is exactly cluster purity `(1/M) Σ_t max_c |t ∩ c|`. All arithmetic
//! is done in exact rationals; floats appear only in reports.

mod sweep;

pub use sweep::{
    score_assignment, topic_floor_sweep, CurvePoint, MeanPoint, SweepConfig, TopicFloor,
    DEFAULT_SWEEP,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Fraction = Ratio<u64>;

/// Documents `0..universe_size`, each in exactly one cluster and one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cluster_of: Vec<usize>,
    class_of: Vec<usize>,
    class_names: Vec<String>,
}

impl Partition {
    /// Builds a partition from per-document cluster ids and class labels.
    pub fn from_labels<S: AsRef<str>>(clusters: &[usize], classes: &[S]) -> Result<Self> {
        if clusters.len() != classes.len() {
            return Err(Error::InvalidPartition(format!(
                "{} cluster ids for {} class labels",
                clusters.len(),
                classes.len()
            )));
        }
        let names: BTreeSet<&str> = classes.iter().map(AsRef::as_ref).collect();
        let class_names: Vec<String> = names.into_iter().map(String::from).collect();
        let index: HashMap<&str, usize> =
            class_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        Ok(Self {
            cluster_of: clusters.to_vec(),
            class_of: classes.iter().map(|c| index[c.as_ref()]).collect(),
            class_names,
        })
    }

    /// Builds a partition from explicit cluster and class sets over
    /// `0..universe_size`. Both families must partition the universe.
    pub fn from_sets(
        clusters: &BTreeMap<usize, BTreeSet<usize>>,
        classes: &BTreeMap<String, BTreeSet<usize>>,
        universe_size: usize,
    ) -> Result<Self> {
        let cover = |sets: Vec<(usize, &BTreeSet<usize>)>, what: &str| -> Result<Vec<usize>> {
            let mut owner = vec![usize::MAX; universe_size];
            for (key, set) in sets {
                for &doc in set {
                    if doc >= universe_size {
                        return Err(Error::InvalidPartition(format!(
                            "{what} contains document {doc} outside the universe"
                        )));
                    }
                    if owner[doc] != usize::MAX {
                        return Err(Error::InvalidPartition(format!(
                            "document {doc} is in two {what}s"
                        )));
                    }
                    owner[doc] = key;
                }
            }
            if let Some(doc) = owner.iter().position(|&o| o == usize::MAX) {
                return Err(Error::InvalidPartition(format!("document {doc} is in no {what}")));
            }
            Ok(owner)
        };
        let cluster_of = cover(clusters.iter().map(|(k, s)| (*k, s)).collect(), "cluster")?;
        let class_names: Vec<String> = classes.keys().cloned().collect();
        let class_of = cover(classes.values().enumerate().collect(), "class")?;
        Ok(Self {
            cluster_of,
            class_of,
            class_names,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Non-empty clusters with their member documents.
    pub fn clusters(&self) -> BTreeMap<usize, BTreeSet<usize>> {
        let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (doc, &c) in self.cluster_of.iter().enumerate() {
            out.entry(c).or_default().insert(doc);
        }
        out
    }

    pub fn classes(&self) -> BTreeMap<String, BTreeSet<usize>> {
        let mut out: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (doc, &c) in self.class_of.iter().enumerate() {
            out.entry(self.class_names[c].clone()).or_default().insert(doc);
        }
        out
    }

    /// Per-cluster class counts, indexed like `class_names`.
    fn contingency(&self) -> BTreeMap<usize, Vec<u64>> {
        let mut table: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (&cluster, &class) in self.cluster_of.iter().zip(&self.class_of) {
            table
                .entry(cluster)
                .or_insert_with(|| vec![0; self.class_names.len()])[class] += 1;
        }
        table
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAlignment {
    pub topic: usize,
    pub size: u64,
    /// Lexicographically first label among those with the largest count.
    pub majority_label: String,
    /// True if more than one label attains the largest count.
    pub tie: bool,
    #[serde(with = "ratio_str")]
    pub align: Fraction,
    pub align_value: f64,
    pub class_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub per_topic: Vec<TopicAlignment>,
    #[serde(with = "ratio_vec_str")]
    pub weights: Vec<Fraction>,
    #[serde(with = "ratio_str")]
    pub avg_align: Fraction,
    pub avg_align_value: f64,
    pub n_topics: usize,
    pub universe_size: usize,
}

impl AlignmentReport {
    pub fn value(&self) -> f64 {
        self.avg_align_value
    }
}

pub fn to_f64(r: Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn topic_alignment(topic: usize, counts: &[u64], names: &[String]) -> TopicAlignment {
    let size: u64 = counts.iter().sum();
    let best = counts.iter().copied().max().unwrap_or(0);
    let winners: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] == best).collect();
    let align = Ratio::new(best, size);
    TopicAlignment {
        topic,
        size,
        majority_label: names[winners[0]].clone(),
        tie: winners.len() > 1,
        align,
        align_value: to_f64(align),
        class_counts: names
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (n.clone(), c))
            .collect(),
    }
}

/// Alignment of one topic with the classes.
pub fn align_topic(p: &Partition, topic: usize) -> Result<Fraction> {
    let mut counts = vec![0u64; p.class_names.len()];
    for (&cluster, &class) in p.cluster_of.iter().zip(&p.class_of) {
        if cluster == topic {
            counts[class] += 1;
        }
    }
    let size: u64 = counts.iter().sum();
    if size == 0 {
        return Err(Error::UnknownTopic(topic));
    }
    Ok(Ratio::new(counts.into_iter().max().unwrap_or(0), size))
}

/// Size-weighted average alignment over the non-empty topics.
pub fn avg_align(p: &Partition) -> AlignmentReport {
    let m = p.universe_size() as u64;
    let per_topic: Vec<TopicAlignment> = p
        .contingency()
        .into_iter()
        .map(|(t, counts)| topic_alignment(t, &counts, &p.class_names))
        .collect();
    let weights: Vec<Fraction> = per_topic.iter().map(|t| Ratio::new(t.size, m.max(1))).collect();
    let avg = per_topic
        .iter()
        .zip(&weights)
        .fold(Ratio::from_integer(0), |acc, (t, &w)| acc + w * t.align);
    AlignmentReport {
        n_topics: per_topic.len(),
        universe_size: p.universe_size(),
        avg_align_value: to_f64(avg),
        avg_align: avg,
        per_topic,
        weights,
    }
}

/// Cluster purity `(1/M) Σ_clusters max_class |cluster ∩ class|`.
pub fn purity(p: &Partition) -> Fraction {
    let m = p.universe_size() as u64;
    if m == 0 {
        return Ratio::from_integer(0);
    }
    let hits: u64 = p
        .contingency()
        .values()
        .map(|counts| counts.iter().copied().max().unwrap_or(0))
        .sum();
    Ratio::new(hits, m)
}

mod ratio_str {
    use super::Fraction;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad fraction {s:?}")))
    }

    pub(super) fn parse(s: &str) -> Option<Fraction> {
        let (n, d) = s.split_once('/')?;
        let n: u64 = n.parse().ok()?;
        let d: u64 = d.parse().ok()?;
        (d != 0).then(|| Fraction::new(n, d))
    }
}

mod ratio_vec_str {
    use super::Fraction;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Fraction], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format!("{}/{}", r.numer(), r.denom()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Fraction>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::ratio_str::parse(s).ok_or_else(|| D::Error::custom(format!("bad fraction {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(clusters: &[usize], classes: &[&str]) -> Partition {
        Partition::from_labels(clusters, classes).unwrap()
    }

    #[test]
    fn single_topic_extremes() {
        let p = part(&[0, 0, 0, 0, 1, 1], &["O", "O", "O", "O", "O", "T"]);
        assert_eq!(align_topic(&p, 0).unwrap(), Ratio::from_integer(1));
        assert_eq!(align_topic(&p, 1).unwrap(), Ratio::new(1, 2));
        assert!(matches!(align_topic(&p, 7), Err(Error::UnknownTopic(7))));
    }

    #[test]
    fn three_quarters() {
        let p = part(&[0, 0, 0, 0], &["O", "O", "O", "T"]);
        assert_eq!(align_topic(&p, 0).unwrap(), Ratio::new(3, 4));
    }

    #[test]
    fn weighted_average_examples() {
        let perfect = part(&[0, 0, 1, 1], &["O", "O", "T", "T"]);
        assert_eq!(avg_align(&perfect).avg_align, Ratio::from_integer(1));

        let mixed = part(&[0, 0, 0, 0, 1, 1, 1, 1], &["O", "O", "O", "T", "O", "T", "T", "T"]);
        let r = avg_align(&mixed);
        assert_eq!(r.avg_align, Ratio::new(3, 4));
        assert_eq!(r.weights, [Ratio::new(1, 2), Ratio::new(1, 2)]);
        assert_eq!(purity(&mixed), r.avg_align);

        let split = part(&[0, 0, 1, 1], &["O", "T", "T", "O"]);
        assert_eq!(avg_align(&split).avg_align, Ratio::new(1, 2));
        assert!(avg_align(&split).per_topic.iter().all(|t| t.tie && t.majority_label == "O"));
    }

    #[test]
    fn singletons_are_pure() {
        let p = part(&[0, 1, 2, 3], &["O", "T", "O", "T"]);
        assert_eq!(purity(&p), Ratio::from_integer(1));
    }

    #[test]
    fn empty_clusters_are_dropped() {
        let p = part(&[3, 3, 9], &["O", "T", "T"]);
        let r = avg_align(&p);
        assert_eq!(r.n_topics, 2);
        assert_eq!(r.weights.iter().sum::<Fraction>(), Ratio::from_integer(1));
    }

    #[test]
    fn set_construction_validates() {
        let clusters: BTreeMap<usize, BTreeSet<usize>> =
            [(0, [0, 1].into()), (1, [2].into())].into_iter().collect();
        let classes: BTreeMap<String, BTreeSet<usize>> =
            [("O".to_string(), [0].into()), ("T".to_string(), [1, 2].into())].into_iter().collect();
        let p = Partition::from_sets(&clusters, &classes, 3).unwrap();
        assert_eq!(p.clusters(), clusters);
        assert_eq!(p.classes(), classes);

        let overlapping: BTreeMap<usize, BTreeSet<usize>> =
            [(0, [0, 1].into()), (1, [1, 2].into())].into_iter().collect();
        assert!(Partition::from_sets(&overlapping, &classes, 3).is_err());
        assert!(Partition::from_sets(&clusters, &classes, 4).is_err());
    }

    #[test]
    fn report_json_carries_exact_fractions() {
        let r = avg_align(&part(&[0, 0, 0, 0], &["O", "O", "O", "T"]));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"avg_align\":\"3/4\""), "{json}");
        let back: AlignmentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

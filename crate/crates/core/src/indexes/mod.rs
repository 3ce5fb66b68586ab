//! Internal cluster validation indexes.
//!
//! All values computed here are raw; see [`crate::calibrate`] for
//! standardization against random clusterings.

mod chisq;
mod density;
mod homogeneity;
mod separation;
mod shape;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, DistanceMatrix, Partition};
use crate::error::{Error, Result};

pub use chisq::{chi_squared_cdf, ln_gamma, regularized_lower_gamma};
pub use density::{denscut, density_mode, kernel_density, DensityModeResult, KernelDensity};
pub use homogeneity::{avewithin, centroid_representation, maxdiameter, widestgap};
pub use separation::{asw, pearsongamma, sindex};
pub use shape::{cvnnd, entropy, kdnorm};

/// Whether larger or smaller raw values indicate a better clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LargerBetter,
    SmallerBetter,
}

macro_rules! index_names {
    ($($variant:ident => $id:literal, $orientation:ident;)*) => {
        /// Names of the internal indexes, in report column order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum IndexName {
            $($variant,)*
        }

        impl IndexName {
            pub const ALL: [IndexName; index_names!(@count $($variant)*)] = [$(IndexName::$variant,)*];

            pub fn id(self) -> &'static str {
                match self {
                    $(IndexName::$variant => $id,)*
                }
            }

            pub fn orientation(self) -> Orientation {
                match self {
                    $(IndexName::$variant => Orientation::$orientation,)*
                }
            }
        }
    };
    (@count $($t:ident)*) => { <[()]>::len(&[$(index_names!(@unit $t)),*]) };
    (@unit $t:ident) => { () };
}

index_names! {
    AveWithin => "avewithin", SmallerBetter;
    MaxDiameter => "maxdiameter", SmallerBetter;
    WidestGap => "widestgap", SmallerBetter;
    SIndex => "sindex", LargerBetter;
    MinSeparation => "min_separation", LargerBetter;
    PearsonGamma => "pearsongamma", LargerBetter;
    DensDec => "densdec", SmallerBetter;
    HighDGap => "highdgap", SmallerBetter;
    DensCut => "denscut", SmallerBetter;
    Entropy => "entropy", LargerBetter;
    KdNorm => "kdnorm", SmallerBetter;
    CvNnd => "cvnnd", SmallerBetter;
    Asw => "asw", LargerBetter;
    WcssCentroid => "wcss_centroid", SmallerBetter;
    SumDistMedoid => "sumdist_medoid", SmallerBetter;
}

impl IndexName {
    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for IndexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for IndexName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexName::ALL
            .into_iter()
            .find(|i| i.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown index '{s}'")))
    }
}

impl Serialize for IndexName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for IndexName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tuning parameters of the indexes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexParams {
    /// Border proportion of the separation index.
    pub sindex_p: f64,
    /// Quantile level of the distances used as kernel radius.
    pub kernel_p: f64,
    /// Neighbour order for cvnnd.
    pub cvnnd_k: usize,
}

impl Default for IndexParams {
    fn default() -> Self {
        IndexParams {
            sindex_p: 0.1,
            kernel_p: 0.1,
            cvnnd_k: 2,
        }
    }
}

/// Raw values of all internal indexes for one partition. Failed indexes are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalIndexVector {
    values: [Option<f64>; IndexName::ALL.len()],
    failures: Vec<(IndexName, String)>,
}

impl InternalIndexVector {
    fn empty() -> Self {
        InternalIndexVector {
            values: [None; IndexName::ALL.len()],
            failures: Vec::new(),
        }
    }

    pub fn get(&self, index: IndexName) -> Option<f64> {
        self.values[index.position()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndexName, Option<f64>)> + '_ {
        IndexName::ALL.into_iter().map(|i| (i, self.get(i)))
    }

    /// Indexes that could not be computed, with the reason.
    pub fn failures(&self) -> &[(IndexName, String)] {
        &self.failures
    }

    fn set(&mut self, index: IndexName, value: f64) {
        self.values[index.position()] = Some(value);
    }

    fn record(&mut self, indexes: &[IndexName], result: Result<Vec<f64>>) {
        match result {
            Ok(values) => {
                for (&i, v) in indexes.iter().zip(values) {
                    self.set(i, v);
                }
            }
            Err(e) => {
                for &i in indexes {
                    self.failures.push((i, e.to_string()));
                }
            }
        }
    }
}

/// Evaluates all indexes for many partitions of one dataset.
///
/// The kernel density depends only on the distances, so it is computed once
/// and shared by every evaluation.
pub struct IndexEngine<'a> {
    data: &'a Dataset,
    dm: &'a DistanceMatrix,
    kd: Result<KernelDensity>,
    params: IndexParams,
}

impl<'a> IndexEngine<'a> {
    pub fn new(data: &'a Dataset, dm: &'a DistanceMatrix, params: IndexParams) -> Self {
        let kd = kernel_density(dm, params.kernel_p);
        IndexEngine { data, dm, kd, params }
    }

    pub fn kernel(&self) -> Option<&KernelDensity> {
        self.kd.as_ref().ok()
    }

    pub fn evaluate(&self, c: &Partition) -> InternalIndexVector {
        use IndexName::*;
        let (dm, data, params) = (self.dm, self.data, &self.params);
        let mut v = InternalIndexVector::empty();
        if c.n() != dm.n() {
            let e = Error::LengthMismatch {
                expected: dm.n(),
                found: c.n(),
            };
            v.record(&IndexName::ALL, Err(e));
            return v;
        }
        v.record(&[AveWithin], Ok(vec![avewithin(dm, c)]));
        v.record(&[MaxDiameter], Ok(vec![maxdiameter(dm, c)]));
        v.record(&[WidestGap], Ok(vec![widestgap(dm, c)]));
        v.record(
            &[SIndex, MinSeparation],
            sindex(dm, c, params.sindex_p).map(|(s, m)| vec![s, m]),
        );
        v.record(&[PearsonGamma], pearsongamma(dm, c).map(|x| vec![x]));
        match &self.kd {
            Ok(kd) => {
                let dmode = density_mode(dm, c, kd);
                v.record(&[DensDec, HighDGap], Ok(vec![dmode.densdec, dmode.highdgap]));
                v.record(&[DensCut], Ok(vec![denscut(dm, c, kd)]));
            }
            Err(e) => {
                let reason = e.to_string();
                for i in [DensDec, HighDGap, DensCut] {
                    v.failures.push((i, reason.clone()));
                }
            }
        }
        v.record(&[Entropy], Ok(vec![entropy(c)]));
        v.record(&[KdNorm], kdnorm(data, c).map(|x| vec![x]));
        v.record(&[CvNnd], cvnnd(dm, c, params.cvnnd_k).map(|x| vec![x]));
        v.record(&[Asw], asw(dm, c).map(|x| vec![x]));
        let (wcss, sumdist) = centroid_representation(data, dm, c);
        v.record(&[WcssCentroid, SumDistMedoid], Ok(vec![wcss, sumdist]));
        v
    }
}

/// All raw internal indexes of one partition.
pub fn all_internal(data: &Dataset, dm: &DistanceMatrix, c: &Partition, params: &IndexParams) -> InternalIndexVector {
    IndexEngine::new(data, dm, *params).evaluate(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::euclidean_distances;

    #[test]
    fn names_and_orientation() {
        assert_eq!(IndexName::ALL.len(), 15);
        assert_eq!(IndexName::ALL[14].id(), "sumdist_medoid");
        assert_eq!(IndexName::Asw.orientation(), Orientation::LargerBetter);
        assert_eq!(IndexName::CvNnd.orientation(), Orientation::SmallerBetter);
        for i in IndexName::ALL {
            assert_eq!(i.id().parse::<IndexName>().unwrap(), i);
        }
    }

    #[test]
    fn single_cluster_marks_guarded_indexes_missing() {
        let d = Dataset::from_1d(&[0.0, 1.0, 2.5, 4.0, 4.2, 7.0, 9.0, 9.1]).unwrap();
        let dm = euclidean_distances(&d).unwrap();
        let c = Partition::from_labels(&[0; 8]).unwrap();
        let v = all_internal(&d, &dm, &c, &IndexParams::default());
        for i in [
            IndexName::PearsonGamma,
            IndexName::SIndex,
            IndexName::MinSeparation,
            IndexName::Asw,
        ] {
            assert_eq!(v.get(i), None, "{i}");
            assert!(v.failures().iter().any(|(f, _)| *f == i));
        }
        for i in [
            IndexName::AveWithin,
            IndexName::Entropy,
            IndexName::KdNorm,
            IndexName::DensCut,
        ] {
            assert!(v.get(i).is_some(), "{i}");
        }
        assert_eq!(v.get(IndexName::Entropy), Some(0.0));
    }
}

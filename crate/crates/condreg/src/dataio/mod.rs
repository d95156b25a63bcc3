//! Dataset model and input/output.
//!
//! A dataset couples three row-aligned pieces: Boolean attributes `x` that
//! conditions are built from, real regression features `y`, and a real
//! target `z`, plus the norm bound `b` that the fitting theory assumes
//! (every ‖y⁽ʲ⁾‖₂ and |z⁽ʲ⁾| is within `b`). Submodules cover synthetic
//! generation with planted ground truth, LIBSVM ingestion, and
//! binarization; this file holds the dataset type itself, CSV round-trips,
//! train/test splitting, and rescaling onto a norm bound.

mod binarize;
mod libsvm;
mod sat;
mod synth;

pub use binarize::{Binarizer, BinarizationScheme};
pub use libsvm::{parse_libsvm, serialize_libsvm};
pub use synth::{generate_synthetic, SyntheticSpec};

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conditions::Dnf;
use crate::error::{Error, Result};
use crate::mat::{BoolMat, RealMat};
use crate::scalar::Scalar;

/// Slack applied when checking the norm bound, so that datasets whose bound
/// was computed as the exact row maximum survive reload and rescaling.
const BOUND_SLACK: f64 = 1e-9;

/// Row-aligned Boolean attributes, real features, and targets, with the
/// common norm bound `b`. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: BoolMat,
    y: RealMat<T>,
    z: Vec<T>,
    b: T,
}

impl<T: Scalar> Dataset<T> {
    /// Validates shapes (m, n, d all at least 1, row counts aligned) and the
    /// norm invariants ‖y⁽ʲ⁾‖₂ ≤ b and |z⁽ʲ⁾| ≤ b.
    pub fn new(x: BoolMat, y: RealMat<T>, z: Vec<T>, b: T) -> Result<Self> {
        let m = x.rows();
        if m == 0 || x.cols() == 0 || y.cols() == 0 {
            return Err(Error::parameter("dataset needs m, n, d all at least 1"));
        }
        if y.rows() != m || z.len() != m {
            return Err(Error::parameter(format!(
                "row counts disagree: x has {}, y has {}, z has {}",
                m,
                y.rows(),
                z.len()
            )));
        }
        if !(b > T::zero()) {
            return Err(Error::parameter("norm bound b must be positive"));
        }
        let limit = b * T::from_f64_c(1.0 + BOUND_SLACK);
        for j in 0..m {
            if y.row_norm_l2(j) > limit || z[j].abs() > limit {
                return Err(Error::parameter(format!(
                    "row {j} exceeds the norm bound b = {b}; rescale first"
                )));
            }
        }
        Ok(Dataset { x, y, z, b })
    }

    pub fn m(&self) -> usize {
        self.x.rows()
    }

    /// Number of Boolean attributes.
    pub fn n(&self) -> usize {
        self.x.cols()
    }

    /// Number of real features.
    pub fn d(&self) -> usize {
        self.y.cols()
    }

    pub fn x(&self) -> &BoolMat {
        &self.x
    }

    pub fn y(&self) -> &RealMat<T> {
        &self.y
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// New dataset holding the listed rows in list order; `b` carries over.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Dataset<T>> {
        if idx.is_empty() {
            return Err(Error::parameter("row selection must keep at least one row"));
        }
        Ok(Dataset {
            x: self.x.select_rows(idx),
            y: self.y.select_rows(idx),
            z: idx.iter().map(|&j| self.z[j]).collect(),
            b: self.b,
        })
    }

    /// Indices of rows satisfying the condition.
    pub fn rows_satisfying(&self, c: &Dnf) -> Vec<usize> {
        (0..self.m())
            .filter(|&j| c.satisfied_by(self.x.row(j)))
            .collect()
    }
}

/// Planted structure behind a synthetic dataset: the condition, the
/// coordinates the sparse predictor lives on, and its coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth<T> {
    pub dnf: Dnf,
    pub coords: Vec<usize>,
    pub coefficients: Vec<T>,
}

/// Shuffles row indices deterministically by `seed` and cuts them into
/// disjoint (train, test) parts of sizes (round(fraction·m), rest). This is
/// the primitive behind [`split_train_test`]; it is public so loaders that
/// must split *before* deriving attributes (thresholds from training rows
/// only) can reuse the exact same permutation.
pub fn split_indices(m: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::parameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let t = (train_fraction * m as f64).round() as usize;
    if t == 0 || t == m {
        return Err(Error::parameter(format!(
            "fraction {train_fraction} of {m} rows leaves an empty split"
        )));
    }
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = perm.split_off(t);
    Ok((perm, test))
}

/// Splits rows into disjoint train/test parts of sizes
/// (round(fraction·m), rest), shuffled deterministically by `seed`.
pub fn split_train_test<T: Scalar>(
    data: &Dataset<T>,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset<T>, Dataset<T>)> {
    let (train_idx, test_idx) = split_indices(data.m(), train_fraction, seed)?;
    let train = data.select_rows(&train_idx)?;
    let test = data.select_rows(&test_idx)?;
    Ok((train, test))
}

/// Scales Y and z jointly so every row obeys the bound `b`, and returns the
/// factor applied (1 when the data already fits; predictions on rescaled
/// data divide by this factor to return to original units). One global
/// factor keeps any linear relationship between y and z intact.
pub fn rescale_to_bound<T: Scalar>(data: &Dataset<T>, b: T) -> Result<(Dataset<T>, T)> {
    if !(b > T::zero()) {
        return Err(Error::parameter("norm bound b must be positive"));
    }
    let mut largest = T::zero();
    for j in 0..data.m() {
        largest = largest.max(data.y.row_norm_l2(j)).max(data.z[j].abs());
    }
    let factor = if largest <= b {
        // Covers all-zero data (largest = 0) and data already within bound.
        T::one()
    } else {
        b / largest
    };
    let scaled = Dataset::new(
        data.x.clone(),
        data.y.map(|v| v * factor),
        data.z.iter().map(|&v| v * factor).collect(),
        b,
    )?;
    Ok((scaled, factor))
}

/// The bound the generator and loaders record: the exact largest row norm,
/// with a floor of 1 so degenerate all-zero data still gets a positive b.
pub fn natural_bound<T: Scalar>(y: &RealMat<T>, z: &[T]) -> T {
    let mut largest = T::zero();
    for j in 0..y.rows() {
        largest = largest.max(y.row_norm_l2(j));
    }
    for &v in z {
        largest = largest.max(v.abs());
    }
    if largest > T::zero() {
        largest
    } else {
        T::one()
    }
}

/// Writes the CSV dialect used across the tools: header `b_1..b_n`,
/// `y_1..y_d`, `z`; Booleans as 0/1.
pub fn write_csv<T: Scalar>(data: &Dataset<T>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=data.n()).map(|i| format!("b_{i}")).collect();
    header.extend((1..=data.d()).map(|i| format!("y_{i}")));
    header.push("z".into());
    w.write_record(&header)?;
    for j in 0..data.m() {
        let mut rec: Vec<String> = data
            .x
            .row(j)
            .iter()
            .map(|&v| if v { "1".into() } else { "0".into() })
            .collect();
        rec.extend(data.y.row(j).iter().map(|v| format!("{}", v.to_f64_c())));
        rec.push(format!("{}", data.z[j].to_f64_c()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV dialect back. Columns are classified by header: names
/// starting with `b_` are Boolean attributes, the single `z` column is the
/// target, and every other column is a real feature; order within each
/// class follows the file. The bound is recomputed as the exact row
/// maximum, so write → read reproduces the dataset bit for bit.
pub fn read_csv<T: Scalar>(input: impl Read) -> Result<Dataset<T>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let mut bool_cols = Vec::new();
    let mut real_cols = Vec::new();
    let mut z_col = None;
    for (i, name) in headers.iter().enumerate() {
        if name.starts_with("b_") {
            bool_cols.push(i);
        } else if name == "z" {
            if z_col.replace(i).is_some() {
                return Err(Error::parameter("two z columns in CSV header"));
            }
        } else {
            real_cols.push(i);
        }
    }
    let z_col = z_col.ok_or_else(|| Error::parameter("CSV header has no z column"))?;
    if bool_cols.is_empty() || real_cols.is_empty() {
        return Err(Error::parameter(
            "CSV needs at least one b_ column and one real feature column",
        ));
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut zs: Vec<T> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header occupies line 1
        let record = record?;
        let field = |col: usize| -> Result<&str> {
            record.get(col).ok_or(Error::Parse {
                line,
                message: format!("missing column {col}"),
            })
        };
        for &c in &bool_cols {
            xs.push(match field(c)? {
                "0" | "false" => false,
                "1" | "true" => true,
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected Boolean 0/1, got {other:?}"),
                    })
                }
            });
        }
        for &c in &real_cols {
            ys.push(parse_real::<T>(field(c)?, line)?);
        }
        zs.push(parse_real::<T>(field(z_col)?, line)?);
    }
    let m = zs.len();
    let x = BoolMat::from_vec(xs, m, bool_cols.len())?;
    let y = RealMat::from_vec(ys, m, real_cols.len())?;
    let b = natural_bound(&y, &zs);
    Dataset::new(x, y, zs, b)
}

pub(crate) fn parse_real<T: Scalar>(text: &str, line: usize) -> Result<T> {
    text.trim()
        .parse::<f64>()
        .map(T::from_f64_c)
        .map_err(|_| Error::Parse {
            line,
            message: format!("expected a number, got {text:?}"),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(m: usize) -> Dataset<f64> {
        // y_1 carries the row index so tests can track rows across splits.
        let x = BoolMat::from_rows(&(0..m).map(|j| vec![j % 2 == 0]).collect::<Vec<_>>()).unwrap();
        let y = RealMat::from_vec((0..m).map(|j| j as f64).collect(), m, 1).unwrap();
        let z: Vec<f64> = (0..m).map(|j| (j as f64) / 2.0).collect();
        let b = natural_bound(&y, &z);
        Dataset::new(x, y, z, b).unwrap()
    }

    #[test]
    fn construction_validates_shapes_and_bounds() {
        let x = BoolMat::from_rows(&[vec![true], vec![false]]).unwrap();
        let y = RealMat::from_vec(vec![3.0, 4.0], 2, 1).unwrap();
        assert!(Dataset::new(x.clone(), y.clone(), vec![0.0, 0.0], 4.0).is_ok());
        // z out of bound
        assert!(Dataset::new(x.clone(), y.clone(), vec![5.0, 0.0], 4.0).is_err());
        // y out of bound
        assert!(Dataset::new(x.clone(), y.clone(), vec![0.0, 0.0], 3.5).is_err());
        // misaligned rows
        assert!(Dataset::new(x, y, vec![0.0], 4.0).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let data = toy(9);
        let (train, test) = split_train_test(&data, 1.0 / 3.0, 42).unwrap();
        assert_eq!((train.m(), test.m()), (3, 6));

        let (train2, test2) = split_train_test(&data, 1.0 / 3.0, 42).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);

        // Disjoint partition: the row markers in y_1 cover 0..m exactly once.
        let mut markers: Vec<f64> = (0..train.m())
            .map(|j| train.y().row(j)[0])
            .chain((0..test.m()).map(|j| test.y().row(j)[0]))
            .collect();
        markers.sort_by(f64::total_cmp);
        assert_eq!(markers, (0..9).map(|j| j as f64).collect::<Vec<_>>());

        let tiny = toy(2);
        let (a, b) = split_train_test(&tiny, 0.5, 0).unwrap();
        assert_eq!((a.m(), b.m()), (1, 1));

        assert!(split_train_test(&tiny, 0.1, 0).is_err()); // empty train
        assert!(split_train_test(&data, 1.0, 0).is_err());
    }

    #[test]
    fn rescale_applies_one_joint_factor() {
        let x = BoolMat::from_rows(&[vec![true], vec![true]]).unwrap();
        let y = RealMat::from_vec(vec![6.0, 8.0, 0.0, 3.0], 2, 2).unwrap();
        let z = vec![5.0, -2.0];
        let data = Dataset::new(x, y, z, 10.0).unwrap();

        let (scaled, factor) = rescale_to_bound(&data, 1.0).unwrap();
        assert_eq!(factor, 0.1);
        for (got, want) in scaled.y().row(0).iter().zip([0.6, 0.8]) {
            approx::assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        for (got, want) in scaled.z().iter().zip([0.5, -0.2]) {
            approx::assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        assert_eq!(scaled.b(), 1.0);

        // Already within bound: untouched, factor 1.
        let (same, factor) = rescale_to_bound(&data, 20.0).unwrap();
        assert_eq!(factor, 1.0);
        assert_eq!(same.y(), data.y());

        // b exactly at the max norm: boundary case, still untouched.
        let (same, factor) = rescale_to_bound(&data, 10.0).unwrap();
        assert_eq!(factor, 1.0);
        assert_eq!(same.z(), data.z());

        // All-zero data: identity transform rather than a division by zero.
        let x = BoolMat::from_rows(&[vec![true]]).unwrap();
        let y = RealMat::from_vec(vec![0.0], 1, 1).unwrap();
        let zero = Dataset::new(x, y, vec![0.0], 1.0).unwrap();
        let (out, factor) = rescale_to_bound(&zero, 0.5).unwrap();
        assert_eq!(factor, 1.0);
        assert_eq!(out.y().row(0), &[0.0]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let spec = SyntheticSpec {
            m: 40,
            d: 3,
            n: 5,
            g: 2,
            k: 2,
            s: 2,
            sigma2: 0.01,
            p_sat: 0.3,
            seed: 11,
        };
        let (data, _) = generate_synthetic::<f64>(&spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        let back: Dataset<f64> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let text = "b_1,y_1,z\n1,2.0,3.0\n2,1.0,0.5\n";
        let err = read_csv::<f64>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        let text = "b_1,y_1,z\n1,abc,0.0\n";
        let err = read_csv::<f64>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        assert!(read_csv::<f64>("b_1,y_1\n1,2.0\n".as_bytes()).is_err());
    }

    #[test]
    fn ground_truth_json_round_trip() {
        let truth = GroundTruth::<f64> {
            dnf: serde_json::from_str(r#"{"terms":[[1,-3],[2]]}"#).unwrap(),
            coords: vec![0, 4],
            coefficients: vec![0.25, -1.5],
        };
        let text = serde_json::to_string(&truth).unwrap();
        let back: GroundTruth<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, truth);
        assert!(text.contains("\"dnf\""));
    }
}

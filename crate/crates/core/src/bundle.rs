//! Tagged matrices shared by the plasma and vacuum builders.

use std::fmt;

use crate::linalg::SMat;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixTag {
    A0,
    A1,
    A2,
    A3,
    Atilde1,
    CalA0,
    CalA1,
    CalA2,
    CalA3,
    E12,
    E13,
    E14,
    B1,
    B2,
    B3,
    FrakB0,
    FrakB1,
    FrakB2,
    FrakB3,
    M0,
    M1,
    M2,
    M3,
    M4,
}

impl MatrixTag {
    pub fn name(self) -> &'static str {
        use MatrixTag::*;
        match self {
            A0 => "A0",
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            Atilde1 => "Atilde1",
            CalA0 => "calA0",
            CalA1 => "calA1",
            CalA2 => "calA2",
            CalA3 => "calA3",
            E12 => "E12",
            E13 => "E13",
            E14 => "E14",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            FrakB0 => "frakB0",
            FrakB1 => "frakB1",
            FrakB2 => "frakB2",
            FrakB3 => "frakB3",
            M0 => "M0",
            M1 => "M1",
            M2 => "M2",
            M3 => "M3",
            M4 => "M4",
        }
    }

    pub fn a(alpha: usize) -> Self {
        [MatrixTag::A0, MatrixTag::A1, MatrixTag::A2, MatrixTag::A3][alpha]
    }

    pub fn cal_a(alpha: usize) -> Self {
        [MatrixTag::CalA0, MatrixTag::CalA1, MatrixTag::CalA2, MatrixTag::CalA3][alpha]
    }

    pub fn frak_b(alpha: usize) -> Self {
        [MatrixTag::FrakB0, MatrixTag::FrakB1, MatrixTag::FrakB2, MatrixTag::FrakB3][alpha]
    }

    pub fn m(alpha: usize) -> Self {
        [MatrixTag::M0, MatrixTag::M1, MatrixTag::M2, MatrixTag::M3, MatrixTag::M4][alpha]
    }
}

impl fmt::Display for MatrixTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixBundle<T, const N: usize> {
    pub entries: SMat<T, N>,
    pub tag: MatrixTag,
    pub symmetric_expected: bool,
}

impl<T: Real, const N: usize> MatrixBundle<T, N> {
    pub fn new(entries: SMat<T, N>, tag: MatrixTag, symmetric_expected: bool) -> Self {
        MatrixBundle {
            entries,
            tag,
            symmetric_expected,
        }
    }

    /// `max|M − Mᵀ| / max|M|`, zero for the zero matrix.
    pub fn relative_asymmetry(&self) -> T {
        let scale = self.entries.max_abs();
        if scale == T::zero() {
            T::zero()
        } else {
            self.entries.asymmetry() / scale
        }
    }

    /// True unless the bundle claims symmetry and misses it by more than `tol` (relative).
    pub fn symmetry_ok(&self, tol: T) -> bool {
        !self.symmetric_expected || self.relative_asymmetry() <= tol
    }

    /// Plain-text dump: one row per line, space-separated, 17 significant digits.
    pub fn dump(&self) -> String {
        dump_matrix(&self.entries)
    }
}

pub fn dump_matrix<T: Real, const N: usize>(m: &SMat<T, N>) -> String {
    let mut out = String::new();
    for row in m.0.iter() {
        let line: Vec<String> = row.iter().map(|x| format!("{:.16e}", x.as_f64())).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the dump format back; used for round-trip checks.
pub fn parse_matrix<const N: usize>(text: &str) -> Option<SMat<f64, N>> {
    let mut m = SMat::<f64, N>::zeros();
    let mut rows = 0;
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        if i >= N {
            return None;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .ok()?;
        if vals.len() != N {
            return None;
        }
        m.0[i].copy_from_slice(&vals);
        rows += 1;
    }
    (rows == N).then_some(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips_bitwise() {
        let m = SMat::<f64, 3>::from_rows([
            [0.1, -2.0 / 3.0, 1e-300],
            [std::f64::consts::PI, 0.0, -7.25e12],
            [1.0, 2.0, 3.0],
        ]);
        let back: SMat<f64, 3> = parse_matrix(&dump_matrix(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn asymmetry_is_relative() {
        let mut m = SMat::<f64, 2>::from_rows([[1e6, 1.0], [1.0, 0.0]]);
        m.0[0][1] += 1e-7;
        let b = MatrixBundle::new(m, MatrixTag::A0, true);
        assert!(b.relative_asymmetry() < 1e-12);
        assert!(b.symmetry_ok(1e-12));
    }
}

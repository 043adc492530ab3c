//! Dynamical Lie algebra of a set of Pauli generators.
//!
//! Distinct Pauli strings are Hilbert–Schmidt orthogonal and the commutator
//! of two Pauli strings is either zero or a single Pauli string, so closure
//! reduces to set membership on phase-free strings.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub struct DlaBasis {
    n_qubits: usize,
    elements: Vec<PauliString>,
    index: HashMap<PauliString, usize>,
}

impl DlaBasis {
    /// Wraps an already-closed list of phase-free strings. Closure is not
    /// checked here; [`structure_constants`] reports violations.
    pub fn from_elements(elements: Vec<PauliString>) -> Result<Self> {
        let n_qubits = elements
            .first()
            .map(PauliString::n_qubits)
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        let mut index = HashMap::with_capacity(elements.len());
        let mut canon = Vec::with_capacity(elements.len());
        for e in elements {
            if e.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: e.n_qubits(),
                });
            }
            let e = e.phase_free();
            if index.insert(e.clone(), canon.len()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate basis element {e}")));
            }
            canon.push(e);
        }
        Ok(Self {
            n_qubits,
            elements: canon,
            index,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PauliString {
        &self.elements[i]
    }

    /// Position of the phase-free form of `p`, if it is a basis element.
    pub fn index_of(&self, p: &PauliString) -> Option<usize> {
        if p.phase_power() == 0 {
            self.index.get(p).copied()
        } else {
            self.index.get(&p.phase_free()).copied()
        }
    }

    /// Scale making each element unit-norm under `Tr[A† B]`: `2^{-n/2}`.
    pub fn normalization(&self) -> f64 {
        (-(self.n_qubits as f64) / 2.0).exp2()
    }

    /// Text export: a header line followed by one Pauli string per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n_qubits={} dimension={}\n", self.n_qubits, self.dim());
        for e in &self.elements {
            let _ = writeln!(out, "{e}");
        }
        out
    }
}

/// Lie closure of `generators` under commutation, generators first and new
/// elements in discovery order.
pub fn close_algebra(generators: &[PauliString], max_dim: usize) -> Result<DlaBasis> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let n = first.n_qubits();
    let mut elements: Vec<PauliString> = Vec::new();
    let mut seen: HashMap<PauliString, usize> = HashMap::new();
    for g in generators {
        if g.n_qubits() != n {
            return Err(Error::QubitMismatch {
                left: n,
                right: g.n_qubits(),
            });
        }
        let g = g.phase_free();
        if !seen.contains_key(&g) {
            seen.insert(g.clone(), elements.len());
            elements.push(g);
        }
    }
    if elements.len() > max_dim {
        return Err(Error::ClosureExceeded { max_dim });
    }

    let mut i = 1;
    while i < elements.len() {
        for j in 0..i {
            if elements[i].commutes_unchecked(&elements[j]) {
                continue;
            }
            let c = elements[i].multiply(&elements[j])?.phase_free();
            if !seen.contains_key(&c) {
                if elements.len() == max_dim {
                    return Err(Error::ClosureExceeded { max_dim });
                }
                seen.insert(c.clone(), elements.len());
                elements.push(c);
            }
        }
        i += 1;
    }
    Ok(DlaBasis {
        n_qubits: n,
        elements,
        index: seen,
    })
}

/// Sparse structure constants: `[iG_α, iG_β] = f · iG_γ` over the
/// normalized basis `G = P / √(2^n)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StructureTensor {
    dim: usize,
    entries: BTreeMap<(usize, usize), (usize, f64)>,
}

impl StructureTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, alpha: usize, beta: usize) -> Option<(usize, f64)> {
        self.entries.get(&(alpha, beta)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), (usize, f64))> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

pub fn structure_constants(basis: &DlaBasis) -> Result<StructureTensor> {
    let dim = basis.dim();
    let scale = basis.normalization();
    let mut entries = BTreeMap::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let (pa, pb) = (basis.element(a), basis.element(b));
            if pa.commutes_unchecked(pb) {
                continue;
            }
            let prod = pa.multiply(pb)?;
            let gamma = basis
                .index_of(&prod)
                .ok_or(Error::ClosureViolation { alpha: a, beta: b })?;
            // [iPa, iPb] = -2 PaPb = -2 i^k Pg = -2 i^{k-1} (iPg), k odd.
            let f = if prod.phase_power() == 1 { -2.0 } else { 2.0 } * scale;
            entries.insert((a, b), (gamma, f));
            entries.insert((b, a), (gamma, -f));
        }
    }
    Ok(StructureTensor { dim, entries })
}

/// One planar rotation of the adjoint action: for `U = exp(-iθ P)`,
/// `U† (a Q + b R) U = (a cos2θ - s b sin2θ) Q + (s a sin2θ + b cos2θ) R`
/// where `Q = first`, `R = second` and `s = sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationPair {
    pub first: usize,
    pub second: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationPlan {
    pub generator: usize,
    pub pairs: Vec<RotationPair>,
}

impl RotationPlan {
    /// Applies `U† · U` for `U = exp(-iθ P_generator)` to coefficients over
    /// the (unnormalized) basis.
    pub fn conjugate(&self, theta: f64, coeffs: &mut [f64]) {
        let (s2, c2) = (2.0 * theta).sin_cos();
        for p in &self.pairs {
            let (a, b) = (coeffs[p.first], coeffs[p.second]);
            let ss = p.sign as f64 * s2;
            coeffs[p.first] = c2 * a - ss * b;
            coeffs[p.second] = ss * a + c2 * b;
        }
    }

    /// Transpose (= inverse) of [`conjugate`](Self::conjugate).
    pub fn conjugate_transpose(&self, theta: f64, coeffs: &mut [f64]) {
        self.conjugate(-theta, coeffs);
    }

    /// `d/dθ` of the conjugation applied to `coeffs`, written into `out`
    /// (entries outside the plan are zero).
    pub fn conjugate_derivative(&self, theta: f64, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let (s2, c2) = (2.0 * theta).sin_cos();
        for p in &self.pairs {
            let (a, b) = (coeffs[p.first], coeffs[p.second]);
            let s = p.sign as f64;
            out[p.first] = 2.0 * (-s2 * a - s * c2 * b);
            out[p.second] = 2.0 * (s * c2 * a - s2 * b);
        }
    }
}

pub fn adjoint_rotation_plan(basis: &DlaBasis, generator_index: usize) -> Result<RotationPlan> {
    let dim = basis.dim();
    if generator_index >= dim {
        return Err(Error::IndexOutOfRange {
            index: generator_index,
            dim,
        });
    }
    let gen = basis.element(generator_index);
    let mut paired = vec![false; dim];
    let mut pairs = Vec::new();
    for k in 0..dim {
        if paired[k] || gen.commutes_unchecked(basis.element(k)) {
            continue;
        }
        // P Q = i^k R with k odd; i·P·Q = -R for k = 1 and +R for k = 3.
        let prod = gen.multiply(basis.element(k))?;
        let r = basis.index_of(&prod).ok_or(Error::ClosureViolation {
            alpha: generator_index,
            beta: k,
        })?;
        let sign = if prod.phase_power() == 1 { -1 } else { 1 };
        paired[k] = true;
        paired[r] = true;
        pairs.push(RotationPair {
            first: k,
            second: r,
            sign,
        });
    }
    Ok(RotationPlan {
        generator: generator_index,
        pairs,
    })
}

/// Plans for every basis element, in basis order.
pub fn all_rotation_plans(basis: &DlaBasis) -> Result<Vec<RotationPlan>> {
    (0..basis.dim())
        .map(|i| adjoint_rotation_plan(basis, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DlaFamily;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn su2() -> DlaBasis {
        close_algebra(&[p("X"), p("Y")], 10).unwrap()
    }

    #[test]
    fn family_dimensions() {
        for n in [4usize, 6, 8] {
            let xy = close_algebra(&DlaFamily::Xy.generators(n), n * n * 4).unwrap();
            assert_eq!(xy.dim(), n * n - n);
            let tfim = close_algebra(&DlaFamily::Tfim.generators(n), n * n * 4).unwrap();
            assert_eq!(tfim.dim(), 2 * n * n - n);
        }
        assert_eq!(close_algebra(&[p("ZI")], 4).unwrap().dim(), 1);
    }

    #[test]
    fn closure_exceeded() {
        let err = close_algebra(&DlaFamily::Xy.generators(6), 20).unwrap_err();
        assert_eq!(err, Error::ClosureExceeded { max_dim: 20 });
    }

    #[test]
    fn closure_idempotent_and_order_free() {
        let b = close_algebra(&DlaFamily::Tfim.generators(5), 1000).unwrap();
        let again = close_algebra(b.elements(), 1000).unwrap();
        assert_eq!(again.elements(), b.elements());

        let mut gens = DlaFamily::Tfim.generators(5);
        gens.reverse();
        let rev = close_algebra(&gens, 1000).unwrap();
        let mut a: Vec<_> = b.elements().to_vec();
        let mut c: Vec<_> = rev.elements().to_vec();
        a.sort();
        c.sort();
        assert_eq!(a, c);
    }

    fn dense_normalized(basis: &DlaBasis, i: usize) -> DMatrix<Complex64> {
        basis.element(i).to_dense().unwrap() * Complex64::new(basis.normalization(), 0.0)
    }

    fn check_structure_against_trace(basis: &DlaBasis) {
        let st = structure_constants(basis).unwrap();
        let iu = Complex64::new(0.0, 1.0);
        let dense: Vec<_> = (0..basis.dim()).map(|i| dense_normalized(basis, i) * iu).collect();
        for a in 0..basis.dim() {
            for b in 0..basis.dim() {
                let comm = &dense[a] * &dense[b] - &dense[b] * &dense[a];
                for g in 0..basis.dim() {
                    let f = (dense[g].adjoint() * &comm).trace();
                    assert!(f.im.abs() < 1e-12);
                    let expected = match st.get(a, b) {
                        Some((gamma, val)) if gamma == g => val,
                        _ => 0.0,
                    };
                    assert!((f.re - expected).abs() < 1e-12, "({a},{b})->{g}: {} vs {expected}", f.re);
                }
            }
        }
    }

    #[test]
    fn su2_structure_constants() {
        let b = su2();
        assert_eq!(b.dim(), 3);
        check_structure_against_trace(&b);
        // [iX, iY] = -2 iZ unnormalized; normalized by 1/√2.
        let (g, f) = structure_constants(&b).unwrap().get(0, 1).unwrap();
        assert_eq!(b.element(g), &p("Z"));
        assert!((f + 2.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn structure_constants_random_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ops = ["X", "Y", "Z"];
        let mut built = 0;
        while built < 3 {
            let gens: Vec<PauliString> = (0..3)
                .map(|_| {
                    let s: String = (0..4)
                        .map(|_| if rng.random_bool(0.5) { "I" } else { ops[rng.random_range(0..3)] })
                        .collect();
                    p(&s)
                })
                .filter(|g| !g.is_identity())
                .collect();
            if gens.is_empty() {
                continue;
            }
            if let Ok(basis) = close_algebra(&gens, 40) {
                check_structure_against_trace(&basis);
                let st = structure_constants(&basis).unwrap();
                for ((a, b), (g, f)) in st.iter() {
                    assert_eq!(st.get(b, a), Some((g, -f)));
                }
                built += 1;
            }
        }
    }

    #[test]
    fn abelian_cases() {
        let b = close_algebra(&[p("ZI"), p("IZ"), p("ZZ")], 10).unwrap();
        assert!(structure_constants(&b).unwrap().is_empty());
        assert!(adjoint_rotation_plan(&b, 0).unwrap().pairs.is_empty());
    }

    #[test]
    fn structure_violation_detected() {
        let b = DlaBasis::from_elements(vec![p("X"), p("Y")]).unwrap();
        assert_eq!(
            structure_constants(&b).unwrap_err(),
            Error::ClosureViolation { alpha: 0, beta: 1 }
        );
        assert!(matches!(
            adjoint_rotation_plan(&b, 0),
            Err(Error::ClosureViolation { .. })
        ));
        assert!(matches!(
            adjoint_rotation_plan(&b, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn z_generator_rotates_x_y() {
        let b = su2();
        let z = b.index_of(&p("Z")).unwrap();
        let plan = adjoint_rotation_plan(&b, z).unwrap();
        assert_eq!(plan.pairs.len(), 1);
        let pair = plan.pairs[0];
        let mut touched = [pair.first, pair.second];
        touched.sort();
        assert_eq!(touched, [0, 1]);
    }

    fn dense_exp_pauli(p: &PauliString, theta: f64) -> DMatrix<Complex64> {
        // exp(-iθP) = cos θ I - i sin θ P
        let d = p.to_dense().unwrap();
        let dim = d.nrows();
        DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(theta.cos(), 0.0)
            - d * Complex64::new(0.0, theta.sin())
    }

    fn rebuild(basis: &DlaBasis, coeffs: &[f64]) -> DMatrix<Complex64> {
        let dim = 1 << basis.n_qubits();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, c) in coeffs.iter().enumerate() {
            m += basis.element(i).to_dense().unwrap() * Complex64::new(*c, 0.0);
        }
        m
    }

    #[test]
    fn plan_matches_dense_conjugation() {
        let basis = close_algebra(&DlaFamily::Xy.generators(4), 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 0..basis.dim() {
            let plan = adjoint_rotation_plan(&basis, m).unwrap();
            let theta: f64 = rng.random_range(-3.0..3.0);
            let coeffs: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut rotated = coeffs.clone();
            plan.conjugate(theta, &mut rotated);
            let u = dense_exp_pauli(basis.element(m), theta);
            let expected = u.adjoint() * rebuild(&basis, &coeffs) * &u;
            let got = rebuild(&basis, &rotated);
            assert!((expected - got).norm() < 1e-10);
        }
    }

    #[test]
    fn plans_preserve_norm() {
        let basis = close_algebra(&DlaFamily::Tfim.generators(6), 200).unwrap();
        let plans = all_rotation_plans(&basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut v: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n0: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..20 {
            for plan in &plans {
                plan.conjugate(rng.random_range(-3.0..3.0), &mut v);
            }
        }
        let n1: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n0 - n1).abs() < 1e-12);
    }

    #[test]
    fn text_export() {
        let b = close_algebra(&DlaFamily::Xy.generators(3), 100).unwrap();
        let text = b.to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n_qubits=3 dimension=6"));
        assert_eq!(lines.count(), 6);
    }
}

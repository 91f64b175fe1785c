use frame_shadows::frame::{canonical_estimator, canonical_frame_superop, estimator_bound, is_tight};
use frame_shadows::operator_space::{pauli, HermOperator, SuperOperator};
use frame_shadows::povm::{AppendixPovm, Povm};
use frame_shadows::variance::{
    a_operator, lambda1_star, variance_averaged, variance_eig_bounds, variance_exact, variance_minmax,
    worst_case_lower_bound,
};
use frame_shadows::{Complex, Herm64};
use nalgebra::DMatrix;

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn assert_spectrum(actual: &[f64], expected: &[f64]) {
    let actual = sorted_desc(actual.to_vec());
    assert_eq!(actual.len(), expected.len());
    for (a, e) in actual.iter().zip(expected) {
        assert!(close(*a, *e), "spectrum {actual:?} vs {expected:?}");
    }
}

fn combo(i: f64, x: f64, y: f64, z: f64) -> Herm64 {
    let terms = [('I', i), ('X', x), ('Y', y), ('Z', z)];
    terms.iter().map(|&(c, w)| pauli::<f64>(c).unwrap().scale(w)).sum()
}

#[test]
fn projective_qubit_measurement() {
    let p = Povm::<f64>::appendix(AppendixPovm::Projective);
    let f = canonical_frame_superop(&p).unwrap();
    assert_spectrum(f.spectrum(), &[2.0, 2.0, 0.0, 0.0]);
    assert!(!f.is_informationally_complete());
    let image = f.apply(&HermOperator::maximally_mixed(2)).unwrap();
    assert!(image.max_abs_diff(&HermOperator::identity(2)) < TOL);
    let z = pauli::<f64>('Z').unwrap();
    let fz = f.traceless_part().apply(&z).unwrap();
    assert!(fz.max_abs_diff(&z.scale(2.0)) < TOL);
}

#[test]
fn non_ic_four_outcome_measurement() {
    let p = Povm::<f64>::appendix(AppendixPovm::NonIc4);
    let f = canonical_frame_superop(&p).unwrap();
    assert_spectrum(f.spectrum(), &[2.0, 1.0, 1.0, 0.0]);
    assert!(!f.is_informationally_complete());
    assert!(canonical_estimator(&p).is_err());
}

#[test]
fn ic_frame_operator_in_hermitian_basis() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let f = canonical_frame_superop(&p).unwrap();
    let n = 1.0 / 9.0;
    #[rustfmt::skip]
    let expected = DMatrix::from_row_slice(4, 4, &[
        2.0, 0.0, 0.0, 0.0,
        0.0, 4.0 * n, n, n,
        0.0, n, 4.0 * n, n,
        0.0, n, n, 4.0 * n,
    ]);
    assert!((f.superop().matrix() - expected).amax() < TOL);
    assert_spectrum(f.spectrum(), &[2.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
}

#[test]
fn ic_frame_operator_in_unit_basis() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let f = canonical_frame_superop(&p).unwrap();
    let c = |re: f64, im: f64| Complex::new(re / 18.0, im / 18.0);
    #[rustfmt::skip]
    let expected = DMatrix::from_row_slice(4, 4, &[
        c(22.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(14.0, 0.0),
        c(1.0, -1.0), c(8.0, 0.0), c(0.0, -2.0), c(-1.0, 1.0),
        c(1.0, 1.0), c(0.0, 2.0), c(8.0, 0.0), c(-1.0, -1.0),
        c(14.0, 0.0), c(-1.0, -1.0), c(-1.0, 1.0), c(22.0, 0.0),
    ]);
    let unit = f.superop().to_unit_basis_matrix();
    assert!((unit - &expected).camax() < TOL);
    let back = SuperOperator::from_unit_basis_matrix(2, &expected).unwrap();
    assert!(back.max_abs_diff(f.superop()) < TOL);
}

#[test]
fn ic_canonical_estimator() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let dual = canonical_estimator(&p).unwrap();
    let expected = [
        combo(0.5, -0.5, -0.5, 2.5),
        combo(0.5, 2.5, -0.5, -0.5),
        combo(0.5, -0.5, 2.5, -0.5),
        combo(0.5, -0.5, -0.5, -0.5),
    ];
    for (got, want) in dual.elements().iter().zip(&expected) {
        assert!(got.max_abs_diff(want) < TOL);
    }
    let z = pauli::<f64>('Z').unwrap();
    let values = dual.estimator_values(&z).unwrap();
    for (v, e) in values.iter().zip([5.0, -1.0, -1.0, -1.0]) {
        assert!(close(*v, e));
    }
}

#[test]
fn ic_variances_and_a_operator() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let dual = canonical_estimator(&p).unwrap();
    let [x, y, z] = ['X', 'Y', 'Z'].map(|c| pauli::<f64>(c).unwrap());
    let p0 = HermOperator::basis_projector(2, 0);
    let p1 = HermOperator::basis_projector(2, 1);
    assert!(close(variance_exact(&p, &dual, &p0, &z).unwrap(), 8.0));
    assert!(close(variance_exact(&p, &dual, &p1, &x).unwrap(), 5.0));
    assert!(close(variance_exact(&p, &dual, &p1, &y).unwrap(), 5.0));
    assert!(close(variance_exact(&p, &dual, &p1, &z).unwrap(), 0.0));

    let a = a_operator(&p, &dual, &x).unwrap();
    let expected = HermOperator::from_real(DMatrix::from_row_slice(2, 2, &[5.0, 4.0, 4.0, 5.0])).unwrap();
    assert!(a.max_abs_diff(&expected) < TOL);
    let mm = variance_minmax(&p, &dual, &x).unwrap();
    assert!(close(mm.min, 1.0) && close(mm.max, 9.0));

    // The eigenvalue-1 eigenvector of A is |->, on which X is estimated exactly.
    let minus = HermOperator::from_real(DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5])).unwrap();
    assert!(close(variance_exact(&p, &dual, &minus, &x).unwrap(), 0.0));
}

#[test]
fn ic_averaged_bracket_and_worst_case() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let z = pauli::<f64>('Z').unwrap();
    // V = 1 for Z.
    let eig = variance_eig_bounds(&p, &z).unwrap();
    let (lo, hi) = eig.averaged(2, 1.0, 1.0);
    assert!(close(lo, 8.0 / 3.0) && close(hi, 17.0 / 3.0));
    assert!(close(eig.condition_number, 2.0));
    for o in ['X', 'Y', 'Z'].map(|c| pauli::<f64>(c).unwrap()) {
        let avg = variance_averaged(&p, &o, 1.0).unwrap();
        assert!(lo - TOL <= avg && avg <= hi + TOL);
    }

    let t = is_tight(&p).unwrap();
    assert!(!t.tight);
    assert!(close(t.trace_full, 10.0 / 3.0) && close(t.trace_sq_full, 14.0 / 3.0));

    let l1 = lambda1_star(10.0 / 3.0, 14.0 / 3.0, 2).unwrap();
    assert!(close(l1, (10.0 - 13f64.sqrt()) / 9.0));
    // Per unit of V rather than Vd, hence the factor d = 2.
    let bound = 2.0 * worst_case_lower_bound(10.0 / 3.0, 14.0 / 3.0, 2, 1.0).unwrap();
    assert!(close(bound, 2.0 / l1 - 1.0 / 3.0));
    assert!((bound - 2.48).abs() < 5e-3);
    assert!(bound < 17.0 / 3.0);

    // With the traces of the traceless part the bound is attained.
    let own = 2.0 * worst_case_lower_bound(t.a, t.b, 2, 1.0).unwrap();
    assert!(close(own, 17.0 / 3.0));
}

#[test]
fn ic_estimates_respect_the_uniform_bound() {
    let p = Povm::<f64>::appendix(AppendixPovm::Ic4);
    let dual = canonical_estimator(&p).unwrap();
    for o in ['X', 'Y', 'Z'].map(|c| pauli::<f64>(c).unwrap()) {
        let b = estimator_bound(&p, &dual, &o).unwrap();
        assert!(b.holds, "{b:?}");
    }
}

use frame_shadows::frame::{canonical_estimator, is_tight};
use frame_shadows::operator_space::{pauli, HermOperator};
use frame_shadows::povm::{content_hash, AppendixPovm, PovmDocument};
use frame_shadows::variance::{variance_averaged, variance_exact};
use frame_shadows::{Povm32, Povm64};

#[test]
fn single_precision_fixture() {
    let p = Povm32::appendix(AppendixPovm::Ic4);
    let dual = canonical_estimator(&p).unwrap();
    let z = pauli::<f32>('Z').unwrap();
    let v = variance_exact(&p, &dual, &HermOperator::basis_projector(2, 0), &z).unwrap();
    assert!((v - 8.0).abs() < 1e-4);
    let m = Povm32::mub(3).unwrap();
    assert!(is_tight(&m).unwrap().tight);
    let avg = variance_averaged(&m, &HermOperator::basis_projector(3, 0), 1.0).unwrap();
    assert!((avg - 10.0 / 12.0 * (2.0 / 3.0) * 1.5).abs() < 1e-3);
}

#[test]
fn precision_cast_round_trip() {
    let p = Povm64::mub(5).unwrap();
    let back: Povm64 = p.cast::<f32>().cast::<f64>();
    for (a, b) in p.elements().iter().zip(back.elements()) {
        assert!(a.max_abs_diff(b) < 1e-6);
    }
}

#[test]
fn documents_round_trip() {
    for p in [Povm64::mub(3).unwrap(), Povm64::appendix(AppendixPovm::Ic4)] {
        let json = PovmDocument::from_povm(&p).to_json();
        let q: Povm64 = PovmDocument::from_json(&json).unwrap().to_povm().unwrap();
        assert_eq!(content_hash(&p), content_hash(&q));
        assert!(q.validate().passed);
    }
}

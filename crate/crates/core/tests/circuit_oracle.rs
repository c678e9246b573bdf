mod common;

use common::*;
use phasekick::circuit::{compile_controlled, inverse_qft, qft, UnitaryMatrix};
use phasekick::sim::{apply_circuit, apply_gate, circuit_unitary};
use phasekick::{Circuit, GateOp, StateVector};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn control_polarity_matches_block_diagonal() {
    // polarity 1: block-diag(I, U); polarity 0: block-diag(U, I) on the control.
    let u = GateOp::ry(0, 0.9).kind().matrix();
    let id = M::identity(2, 2);
    let blk = |a: &M, b: &M| {
        let mut m = M::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(a);
        m.view_mut((2, 2), (2, 2)).copy_from(b);
        m
    };
    let on = Circuit::from_ops(2, [GateOp::ry(0, 0.9).with_control(1, true).unwrap()]).unwrap();
    let off = Circuit::from_ops(2, [GateOp::ry(0, 0.9).with_control(1, false).unwrap()]).unwrap();
    assert!(max_entry_diff(&circuit_unitary(&on).unwrap(), &blk(&id, &u)) < 1e-14);
    assert!(max_entry_diff(&circuit_unitary(&off).unwrap(), &blk(&u, &id)) < 1e-14);
}

#[test]
fn simulator_agrees_with_kron_oracle_up_to_four_qubits() {
    let mut r = rng(1);
    for n in 2..=4 {
        for _ in 0..10 {
            let mut c = random_compilable(n, 6, 6, None, &mut r);
            // plus a dense two-qubit gate with a control and a swap
            if n >= 3 {
                let dense = phasekick::circuit::householder_prep(&random_state(2, &mut r)).unwrap();
                let op = GateOp::unitary(dense, vec![2, 0]).unwrap().with_control(1, false).unwrap();
                c.push(op).unwrap();
                c.push(GateOp::swap(0, n - 1).unwrap()).unwrap();
            }
            let sim = circuit_unitary(&c).unwrap();
            let oracle = circuit_matrix(&c);
            assert!(max_entry_diff(&sim, &oracle) < 1e-12, "n={n}");
        }
    }
}

#[test]
fn linearity_on_random_three_qubit_states() {
    let mut r = rng(2);
    for _ in 0..20 {
        let c = random_compilable(3, 5, 5, None, &mut r);
        let (a, b) = (random_state(3, &mut r), random_state(3, &mut r));
        let (alpha, beta) = (cis(r.gen::<f64>()) * 0.6, cis(r.gen::<f64>()) * 0.8);
        let combo: Vec<_> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| alpha * x + beta * y).collect();
        let norm = combo.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mixed = StateVector::from_amplitudes(combo.iter().map(|z| z / norm).collect()).unwrap();
        let lhs = apply_circuit(mixed, &c).unwrap();
        let ra = apply_circuit(a, &c).unwrap();
        let rb = apply_circuit(b, &c).unwrap();
        for i in 0..8 {
            let rhs = (alpha * ra.amplitude(i) + beta * rb.amplitude(i)) / norm;
            assert!((lhs.amplitude(i) - rhs).norm() < 1e-12);
        }
    }
}

#[test]
fn norm_preserved() {
    let mut r = rng(3);
    let c = random_compilable(4, 30, 30, None, &mut r);
    let mut s = random_state(4, &mut r);
    for op in c.ops() {
        s = apply_gate(s, op).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn inverse_qft_equals_inverse_dft() {
    for m in 1..=5 {
        let sim = circuit_unitary(&inverse_qft(m).unwrap()).unwrap();
        assert!(max_entry_diff(&sim, &inverse_dft(m)) < 1e-12, "m={m}");
        let round = inverse_qft(m).unwrap().then(&qft(m).unwrap()).unwrap();
        let id = M::identity(1 << m, 1 << m);
        assert!(max_entry_diff(&circuit_unitary(&round).unwrap(), &id) < 1e-12);
    }
}

#[test]
fn inverse_qft_decodes_fourier_state() {
    // qubit l carries e^{2πi·j·2^l/2^m}; j = 5, m = 3
    let (j, m) = (5usize, 3usize);
    let factors: Vec<StateVector> = (0..m)
        .map(|l| {
            let ph = cis(2.0 * std::f64::consts::PI * (j << l) as f64 / (1 << m) as f64);
            StateVector::normalized(vec![c(1.0, 0.0), ph]).unwrap()
        })
        .collect();
    let fourier = factors.iter().skip(1).fold(factors[0].clone(), |acc, f| f.tensor(&acc).unwrap());
    let out = apply_circuit(fourier, &inverse_qft(m).unwrap()).unwrap();
    assert!(out.probabilities()[j] >= 1.0 - 1e-10);
}

#[test]
fn compile_controlled_matches_semantic_control() {
    let mut r = rng(4);
    for trial in 0..40 {
        let n = 3;
        let control = trial % n;
        let polarity = trial % 2 == 0;
        let c = random_compilable(n, 4, 3, Some(control), &mut r);
        let compiled = compile_controlled(&c, control, polarity).unwrap();
        let semantic = c.controlled(control, polarity).unwrap();
        let counts = c.count_gates();
        assert_eq!(compiled.count_gates().n2, 2 * counts.n1 + 6 * counts.n2);
        let a = circuit_unitary(&compiled).unwrap();
        let b = circuit_matrix(&semantic);
        assert!(max_entry_diff(&a, &b) < 1e-10, "trial {trial}");
    }
}

#[test]
fn compile_profile_ten_four() {
    let mut r = rng(5);
    let c = random_compilable(4, 10, 4, Some(3), &mut r);
    assert_eq!(c.count_gates().n1, 10);
    assert_eq!(c.count_gates().n2, 4);
    let compiled = compile_controlled(&c, 3, true).unwrap();
    assert_eq!(compiled.count_gates().n2, 44);
    let semantic = c.controlled(3, true).unwrap();
    for _ in 0..5 {
        let s = random_state(4, &mut r);
        let x = apply_circuit(s.clone(), &compiled).unwrap();
        let y = apply_circuit(s, &semantic).unwrap();
        assert!(overlap(&x, &y) >= 1.0 - 1e-10);
        assert!(max_amp_diff(&x, &y) < 1e-10);
    }
}

#[test]
fn power_of_eigenphase_circuit() {
    // diag(1, e^{2πiθ}) on |1⟩ picks up e^{2πi·4θ} after power 4.
    let theta = 0.137;
    let u = Circuit::from_ops(1, [GateOp::phase(0, 2.0 * std::f64::consts::PI * theta)]).unwrap();
    let out = apply_circuit(StateVector::basis(1, 1).unwrap(), &u.power(4).unwrap()).unwrap();
    assert!((out.amplitude(1) - cis(2.0 * std::f64::consts::PI * 4.0 * theta)).norm() < 1e-12);
    let xx = Circuit::from_ops(1, [GateOp::x(0)]).unwrap().power(2).unwrap();
    let mut r = rng(6);
    let s = random_state(1, &mut r);
    assert!(max_amp_diff(&apply_circuit(s.clone(), &xx).unwrap(), &s) < 1e-12);
}

#[test]
fn power_invert_algebra() {
    let mut r = rng(7);
    for k in 1..4 {
        let c = random_compilable(3, 5, 3, None, &mut r);
        let a = circuit_unitary(&c.power(k).unwrap().invert()).unwrap();
        let b = circuit_unitary(&c.invert().power(k).unwrap()).unwrap();
        assert!(max_entry_diff(&a, &b) < 1e-12);
        let round = circuit_unitary(&c.then(&c.invert()).unwrap()).unwrap();
        assert!(max_entry_diff(&round, &M::identity(8, 8)) < 1e-12);
    }
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (any::<u64>(), 0usize..8, 0usize..6).prop_map(|(seed, n1, n2)| {
        let mut r = rng(seed);
        let mut c = random_compilable(3, n1, n2, None, &mut r);
        let dense = UnitaryMatrix::new("d", circuit_unitary(&random_compilable(2, 3, 2, None, &mut r)).unwrap())
            .unwrap();
        c.push(GateOp::unitary(dense, vec![0, 2]).unwrap()).unwrap();
        c
    })
}

proptest! {
    #[test]
    fn json_round_trip_is_lossless(c in arb_circuit()) {
        let back = Circuit::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(&back, &c);
        let via_serde: Circuit = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(via_serde, c);
    }
}

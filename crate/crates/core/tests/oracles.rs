//! Checks against independent oracles: dense matrices for the Clifford
//! rules and brute-force enumeration for the code.

use num_complex::Complex64 as C;
use steane_ft::circuit::{conjugate, Gate};
use steane_ft::code::{self, classify, decode, syndrome, ErrorClass, Syndrome};
use steane_ft::{Pauli, PauliMask};

type M4 = [[C; 4]; 4];

fn single(p: Pauli) -> [[C; 2]; 2] {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Z => [[o, z], [z, -o]],
        Pauli::Y => [[z, -i], [i, z]],
    }
}

/// Qubit 0 is the most significant tensor factor.
fn kron(a: [[C; 2]; 2], b: [[C; 2]; 2]) -> M4 {
    let mut m = [[C::default(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[r / 2][c / 2] * b[r % 2][c % 2];
        }
    }
    m
}

fn pauli2(m: &PauliMask) -> M4 {
    kron(single(m.get(0)), single(m.get(1)))
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut m = [[C::default(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            for k in 0..4 {
                m[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    m
}

fn dagger(a: &M4) -> M4 {
    let mut m = [[C::default(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[c][r].conj();
        }
    }
    m
}

/// True when `a = λ b` for some unit-modulus λ.
fn equal_up_to_phase(a: &M4, b: &M4) -> bool {
    let mut phase = None;
    for r in 0..4 {
        for c in 0..4 {
            if b[r][c].norm() > 1e-9 {
                let l = a[r][c] / b[r][c];
                match phase {
                    None => phase = Some(l),
                    Some(p) => {
                        if (p - l).norm() > 1e-9 {
                            return false;
                        }
                    }
                }
            } else if a[r][c].norm() > 1e-9 {
                return false;
            }
        }
    }
    phase.is_some_and(|p| (p.norm() - 1.0).abs() < 1e-9)
}

fn gate_matrix(g: &Gate) -> M4 {
    let o = C::new(1.0, 0.0);
    let z = C::default();
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let had = [[h, h], [h, -h]];
    let id = single(Pauli::I);
    match *g {
        Gate::H(0) => kron(had, id),
        Gate::H(1) => kron(id, had),
        Gate::Cnot { control: 0, target: 1 } => [
            [o, z, z, z],
            [z, o, z, z],
            [z, z, z, o],
            [z, z, o, z],
        ],
        Gate::Cnot { control: 1, target: 0 } => [
            [o, z, z, z],
            [z, z, z, o],
            [z, z, o, z],
            [z, o, z, z],
        ],
        _ => unreachable!(),
    }
}

fn all_two_qubit() -> Vec<PauliMask> {
    (0..16u64)
        .map(|k| PauliMask::from_bits(2, k & 3, k >> 2).unwrap())
        .collect()
}

#[test]
fn frame_conjugation_matches_dense_matrices() {
    for g in [Gate::H(0), Gate::H(1), Gate::cnot(0, 1), Gate::cnot(1, 0)] {
        let u = gate_matrix(&g);
        for p in all_two_qubit() {
            let mut q = p;
            conjugate(&mut q, &g).unwrap();
            let expect = mul(&mul(&u, &pauli2(&p)), &dagger(&u));
            assert!(equal_up_to_phase(&expect, &pauli2(&q)), "{g} on {p} gave {q}");
        }
    }
}

#[test]
fn anticommutation_matches_dense_matrices() {
    for a in all_two_qubit() {
        for b in all_two_qubit() {
            let (ma, mb) = (pauli2(&a), pauli2(&b));
            let ab = mul(&ma, &mb);
            let ba = mul(&mb, &ma);
            let anti = (0..4).all(|r| (0..4).all(|c| (ab[r][c] + ba[r][c]).norm() < 1e-9));
            assert_eq!(a.anticommutes(&b).unwrap(), anti, "{a} vs {b}");
            // the product is the XOR of the masks, up to phase
            assert!(equal_up_to_phase(&ab, &pauli2(&a.compose(&b).unwrap())));
        }
    }
}

fn all_seven_qubit() -> impl Iterator<Item = PauliMask> {
    (0..1u64 << 14).map(|k| PauliMask::from_bits(7, k & 0x7f, k >> 7).unwrap())
}

#[test]
fn coset_partition_is_64_4032_12288() {
    let mut counts = [0usize; 3];
    for e in all_seven_qubit() {
        counts[classify(&e).index()] += 1;
    }
    assert_eq!(counts, [64, 4032, 12288]);
}

#[test]
fn weight_one_pairs_biject_onto_syndromes() {
    let mut seen = std::collections::HashSet::new();
    for i in 0..=7usize {
        for k in 0..=7usize {
            let mut e = PauliMask::identity(7).unwrap();
            if i > 0 {
                e.apply(i - 1, Pauli::X);
            }
            if k > 0 {
                e.apply(k - 1, Pauli::Z);
            }
            let s = syndrome(&e);
            assert_eq!(s, Syndrome::new(i as u8, k as u8));
            assert!(seen.insert(s));
            assert_eq!(decode(s), e);
        }
    }
    assert_eq!(seen.len(), 64);
}

#[test]
fn trivial_class_is_the_stabilizer_group() {
    // F0 errors commute with every generator and with both logical operators.
    let stabilizers: Vec<PauliMask> = code::CHECK_ROWS
        .iter()
        .flat_map(|&r| {
            [
                PauliMask::from_bits(7, r, 0).unwrap(),
                PauliMask::from_bits(7, 0, r).unwrap(),
            ]
        })
        .collect();
    let logical_x = PauliMask::from_bits(7, 0x7f, 0).unwrap();
    let logical_z = PauliMask::from_bits(7, 0, 0x7f).unwrap();
    for e in all_seven_qubit().filter(|e| classify(e) == ErrorClass::CorrectIdentity) {
        for s in &stabilizers {
            assert!(!e.anticommutes(s).unwrap());
        }
        assert!(!e.anticommutes(&logical_x).unwrap());
        assert!(!e.anticommutes(&logical_z).unwrap());
    }
}

#[test]
fn generators_commute_with_logicals() {
    let logical_x = PauliMask::from_bits(7, 0x7f, 0).unwrap();
    let logical_z = PauliMask::from_bits(7, 0, 0x7f).unwrap();
    assert!(logical_x.anticommutes(&logical_z).unwrap());
    for &r in &code::CHECK_ROWS {
        for g in [
            PauliMask::from_bits(7, r, 0).unwrap(),
            PauliMask::from_bits(7, 0, r).unwrap(),
        ] {
            assert!(!g.anticommutes(&logical_x).unwrap());
            assert!(!g.anticommutes(&logical_z).unwrap());
            assert!(syndrome(&g).is_trivial());
        }
    }
}

//! Gates, states and overlaps on a handful of qubits.

use floquet_discovery::circuits::Circuit;
use floquet_discovery::statevector::{kron2, pauli_x, Gate1Q, Gate2Q, State, ONE, ZERO};
use num_complex::Complex64 as C64;

fn main() -> floquet_discovery::Result<()> {
    // Site i is bit i of the basis index.
    let s = State::basis_state(3, 0b001)?;
    println!("|001> amplitudes: {:?}", nonzero(&s));

    let flipped = s.apply_1q(&Gate1Q::new(pauli_x(), 2))?;
    println!("X on site 2: {:?}", nonzero(&flipped));

    // X⊗X on the ordered pair (0, 1).
    let xx = Gate2Q::new(kron2(&pauli_x(), &pauli_x()), 0, 1)?;
    println!("XX on (0,1): {:?}", nonzero(&s.apply_2q(&xx)?));

    // |+> on every site, then a Bell-type circuit.
    let h = 1.0 / 2f64.sqrt();
    let plus = State::product(&[[C64::new(h, 0.0), C64::new(h, 0.0)]; 2])?;
    let mut c = Circuit::new(2);
    let cnot = [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [ZERO, ZERO, ONE, ZERO],
    ];
    c.push_2q(cnot, 1, 0)?;
    let out = c.apply(&plus)?;
    println!("norm after circuit: {:.15}", out.norm());
    println!("<+,+|out> = {:.6}", plus.overlap(&out)?);
    Ok(())
}

fn nonzero(s: &State) -> Vec<(usize, C64)> {
    s.amps()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(i, a)| (i, *a))
        .collect()
}

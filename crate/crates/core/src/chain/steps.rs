use rand::Rng;

use crate::engine::{FrequencyVector, MASS_TOL};
use crate::samplers::hazards;

/// Moves the first atom behind the next `x - 1` atoms, padding with zero
/// atoms if the list is shorter. Requires `x >= 1`.
pub fn insert_first_at(atoms: &[f64], x: usize) -> Vec<f64> {
    assert!(x >= 1, "insertion position is 1-based");
    let mut rest: Vec<f64> = atoms.get(1..).unwrap_or_default().to_vec();
    if rest.len() < x - 1 {
        rest.resize(x - 1, 0.0);
    }
    rest.insert(x - 1, atoms.first().copied().unwrap_or(0.0));
    rest
}

/// Moves the atom at 1-based position `j` to the front.
pub fn move_to_front(atoms: &[f64], j: usize) -> Vec<f64> {
    let mut out = atoms.to_vec();
    let v = out.remove(j - 1);
    out.insert(0, v);
    out
}

/// One forward move: drop a zero first atom, otherwise reinsert it at a
/// position drawn from the law of X.
pub fn top_to_random_step<R: Rng + ?Sized>(f: &FrequencyVector, rng: &mut R) -> FrequencyVector {
    let first = f.atom(0);
    if first <= 0.0 {
        return f.reordered(f.atoms().get(1..).unwrap_or_default().to_vec());
    }
    let proper = f.dust() <= MASS_TOL;
    let mut x = 1;
    loop {
        // for proper frequencies the last listed position always stops
        if proper && x >= f.atoms().len() {
            break;
        }
        let h = hazards(f.atoms(), x)[x - 1];
        if rng.random::<f64>() < h {
            break;
        }
        x += 1;
    }
    f.reordered(insert_first_at(f.atoms(), x))
}

/// One reverse move: with the dust probability prepend a zero atom,
/// otherwise pick atom `j` with probability `P_j` and move it to the front.
pub fn random_to_top_step<R: Rng + ?Sized>(f: &FrequencyVector, rng: &mut R) -> FrequencyVector {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in f.atoms().iter().enumerate() {
        acc += p;
        if u < acc {
            return f.reordered(move_to_front(f.atoms(), i + 1));
        }
    }
    let mut atoms = Vec::with_capacity(f.atoms().len() + 1);
    atoms.push(0.0);
    atoms.extend_from_slice(f.atoms());
    f.reordered(atoms)
}

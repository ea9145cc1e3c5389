//! Independent real-matrix reference for two-qubit circuits. Built from
//! Kronecker products so that it shares no code with the library's gate
//! routines.

#![allow(dead_code)]

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub const ZERO: [f64; 2] = [1.0, 0.0];
pub const ONE: [f64; 2] = [0.0, 1.0];
pub const PLUS: [f64; 2] = [S, S];
pub const MINUS: [f64; 2] = [S, -S];

const H: [[f64; 2]; 2] = [[S, S], [S, -S]];
const I: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

pub fn ket(a: [f64; 2], b: [f64; 2]) -> Vec4 {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

pub fn combine(x: f64, a: Vec4, y: f64, b: Vec4) -> Vec4 {
    [0, 1, 2, 3].map(|i| x * a[i] + y * b[i])
}

fn kron(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    m
}

pub fn h1() -> Mat4 {
    kron(H, I)
}

pub fn h2() -> Mat4 {
    kron(I, H)
}

pub fn cz() -> Mat4 {
    let mut m = kron(I, I);
    m[3][3] = -1.0;
    m
}

pub fn apply(m: &Mat4, v: Vec4) -> Vec4 {
    [0, 1, 2, 3].map(|i| (0..4).map(|j| m[i][j] * v[j]).sum())
}

pub fn probs(v: Vec4) -> Vec4 {
    v.map(|a| a * a)
}

/// `(o1, o2)` branches with nonzero probability.
pub fn branches(v: Vec4) -> Vec<(bool, bool)> {
    (0..4).filter(|&i| v[i] * v[i] > 1e-12).map(|i| (i & 2 != 0, i & 1 != 0)).collect()
}

/// Protocol I codeword: `|mm>` with H on qubit `r` (1 or 2).
pub fn p1_codeword(m: bool, r: u8) -> Vec4 {
    let base = if m { ket(ONE, ONE) } else { ket(ZERO, ZERO) };
    apply(&if r == 1 { h1() } else { h2() }, base)
}

/// Protocol II codewords written as kets.
pub fn p2_codeword(m: bool, a: bool) -> Vec4 {
    match (m, a) {
        (true, false) => combine(S, ket(MINUS, ZERO), -S, ket(PLUS, ONE)),
        (false, false) => combine(S, ket(PLUS, ZERO), -S, ket(MINUS, ONE)),
        (true, true) => ket(MINUS, MINUS),
        (false, true) => ket(PLUS, MINUS),
    }
}

pub fn p2_bob(v: Vec4, b: bool) -> Vec4 {
    let v = if b { apply(&cz(), v) } else { v };
    apply(&h1(), v)
}

pub fn p1_bob(v: Vec4, hadamard_basis: bool) -> Vec4 {
    if hadamard_basis {
        apply(&h2(), apply(&h1(), v))
    } else {
        v
    }
}

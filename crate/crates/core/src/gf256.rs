//! Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1, and an incremental
//! row-echelon basis that tracks the value of every stored combination.

const POLY: u16 = 0x11B;
pub const GENERATOR: u8 = 3;

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        // x * 3 = x * 2 + x
        let mut y = (x << 1) ^ x;
        if y & 0x100 != 0 {
            y ^= POLY;
        }
        x = y;
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
static EXP: [u8; 512] = TABLES.0;
static LOG: [u8; 256] = TABLES.1;

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        EXP[LOG[a as usize] as usize + LOG[b as usize] as usize]
    }
}

#[inline]
pub fn inv(a: u8) -> u8 {
    assert!(a != 0, "zero has no inverse in GF(256)");
    EXP[255 - LOG[a as usize] as usize]
}

#[inline]
pub fn div(a: u8, b: u8) -> u8 {
    mul(a, inv(b))
}

/// `dst += k * src`.
pub fn axpy(dst: &mut [u8], k: u8, src: &[u8]) {
    if k == 0 {
        return;
    }
    let lk = LOG[k as usize] as usize;
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d ^= EXP[lk + LOG[s as usize] as usize];
        }
    }
}

pub fn dot(a: &[u8], b: &[u8]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ mul(x, y))
}

/// Row space of coefficient vectors, each paired with its value `coeffs · x`
/// for a fixed hidden vector `x`.
#[derive(Clone, Debug)]
pub struct Basis {
    width: usize,
    rows: Vec<(usize, Vec<u8>, u8)>,
}

impl Basis {
    pub fn new(width: usize) -> Self {
        Basis { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Eliminates the span from `v`; returns the accumulated value of the removed part.
    fn reduce(&self, v: &mut [u8]) -> u8 {
        let mut acc = 0;
        for (pivot, row, value) in &self.rows {
            let k = v[*pivot];
            if k != 0 {
                axpy(v, k, row);
                acc ^= mul(k, *value);
            }
        }
        acc
    }

    /// Adds a row; returns false when it was already in the span.
    pub fn insert(&mut self, mut coeffs: Vec<u8>, value: u8) -> bool {
        debug_assert_eq!(coeffs.len(), self.width);
        let value = value ^ self.reduce(&mut coeffs);
        let Some(pivot) = coeffs.iter().position(|&c| c != 0) else { return false };
        let scale = inv(coeffs[pivot]);
        for c in coeffs.iter_mut() {
            *c = mul(*c, scale);
        }
        self.rows.push((pivot, coeffs, mul(value, scale)));
        true
    }

    /// Value of `coeffs · x` when `coeffs` lies in the span.
    pub fn evaluate(&self, coeffs: &[u8]) -> Option<u8> {
        let mut v = coeffs.to_vec();
        let value = self.reduce(&mut v);
        v.iter().all(|&c| c == 0).then_some(value)
    }

    pub fn contains(&self, coeffs: &[u8]) -> bool {
        self.evaluate(coeffs).is_some()
    }

    /// Value of the hidden coordinate `j`.
    pub fn symbol(&self, j: usize) -> Option<u8> {
        let mut e = vec![0u8; self.width];
        e[j] = 1;
        self.evaluate(&e)
    }
}

/// Rank of the rows restricted to `columns`.
pub fn rank_on(rows: &[Vec<u8>], columns: &[usize]) -> usize {
    let mut basis = Basis::new(columns.len());
    rows.iter().filter(|r| basis.insert(columns.iter().map(|&c| r[c]).collect(), 0)).count()
}

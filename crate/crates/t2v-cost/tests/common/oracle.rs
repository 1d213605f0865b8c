//! Naive big-integer evaluation of every FLOP term, written from the
//! formulas directly and sharing no code with the library.

use num_bigint::BigUint;

pub fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

pub fn cdiv(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn to_u128(v: &BigUint) -> u128 {
    u128::try_from(v).expect("oracle value fits in u128")
}

fn exact_div(v: BigUint, den: u64) -> Option<BigUint> {
    (v.clone() % big(den) == big(0)).then(|| v / big(den))
}

pub fn tokens(h: u64, w: u64, t: u64, vt: u64, vs: u64, ph: u64, pw: u64) -> u64 {
    (1 + cdiv(t - 1, vt)) * cdiv(h, vs * ph) * cdiv(w, vs * pw)
}

pub fn self_attn(l: u64, d: u64, n: u64) -> BigUint {
    let qkv = big(6) * big(l) * big(d) * big(d);
    let scores = big(2) * big(l) * big(l) * big(d);
    let mix = big(2) * big(l) * big(l) * big(d);
    let out = big(2) * big(l) * big(d) * big(d);
    big(n) * (qkv + scores + mix + out)
}

pub fn cross_attn(l: u64, d: u64, n: u64, m: u64) -> BigUint {
    let q = big(2) * big(l) * big(d) * big(d);
    let kv = big(4) * big(m) * big(d) * big(d);
    let scores_mix = big(4) * big(l) * big(m) * big(d);
    let out = big(2) * big(l) * big(d) * big(d);
    big(n) * (q + kv + scores_mix + out)
}

/// `f = num / den`; `None` when the count is not an integer.
pub fn mlp(l: u64, d: u64, n: u64, f: (u64, u64)) -> Option<BigUint> {
    exact_div(big(n) * big(4) * big(f.0) * big(l) * big(d) * big(d), f.1)
}

pub fn timestep(dt: u64, d: u64) -> BigUint {
    big(2) * big(dt) * big(d) + big(14) * big(d) * big(d)
}

pub fn text(layers: u64, d: u64, m: u64, f: (u64, u64), passes: u64) -> Option<BigUint> {
    let ffn = exact_div(big(4) * big(f.0) * big(m) * big(d) * big(d), f.1)?;
    let per_layer = big(8) * big(m) * big(d) * big(d) + big(4) * big(m) * big(m) * big(d) + ffn;
    Some(big(passes) * big(layers) * per_layer)
}

pub fn conv(k: [u64; 3], c_in: u64, c_out: u64, t: u64, h: u64, w: u64, repeat: u64) -> BigUint {
    let mut acc = big(0);
    for _ in 0..repeat {
        acc += big(2)
            * big(k[0])
            * big(k[1])
            * big(k[2])
            * big(c_in)
            * big(c_out)
            * big(t)
            * big(h)
            * big(w);
    }
    acc
}

pub fn mid_attn(t: u64, l: u64, c: u64) -> BigUint {
    big(t) * (big(8) * big(c) * big(c) * big(l) + big(4) * big(l) * big(l) * big(c))
}

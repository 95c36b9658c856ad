//! Random instances and loop-based reference evaluations shared by the
//! integration tests. Nothing here calls into the library's cost code.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use privgame::multi::{MultiGameInstance, MultiJoint, MultiReceiverPolicy};
use privgame::{DistortionMatrix, FiniteSpace, GameInstance, JointPXZW, ReceiverPolicy, SenderPolicy};

pub fn space(n: usize) -> FiniteSpace {
    FiniteSpace::new(n).unwrap()
}

/// Positive weights normalized to sum to one.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn random_joint(rng: &mut ChaCha8Rng, nx: usize, nw: usize) -> JointPXZW {
    JointPXZW::new(space(nx), space(nw), simplex(rng, nx * nx * nw)).unwrap()
}

pub fn random_distortion(rng: &mut ChaCha8Rng, n: usize) -> DistortionMatrix {
    let d = (0..n * n)
        .map(|i| if i / n == i % n { 0.0 } else { rng.gen_range(0.2..1.5) })
        .collect();
    DistortionMatrix::new(n, d).unwrap()
}

/// Game with `|Y| = |X|`, a random joint and a random distortion.
pub fn random_game(rng: &mut ChaCha8Rng, nx: usize, nw: usize, rho: f64) -> GameInstance {
    let joint = random_joint(rng, nx, nw);
    let d = random_distortion(rng, nx);
    GameInstance::new(joint, d, space(nx), rho).unwrap()
}

/// Game with sizes and ρ drawn from small ranges.
pub fn any_game(rng: &mut ChaCha8Rng) -> GameInstance {
    let nx = rng.gen_range(2..=4);
    let nw = rng.gen_range(2..=4);
    let rho = rng.gen_range(0.0..1.5);
    random_game(rng, nx, nw, rho)
}

pub fn random_sender(rng: &mut ChaCha8Rng, [ny, nz, nw]: [usize; 3]) -> SenderPolicy {
    let mut a = vec![0.0; ny * nz * nw];
    for z in 0..nz {
        for w in 0..nw {
            let col = simplex(rng, ny);
            for y in 0..ny {
                a[(y * nz + z) * nw + w] = col[y];
            }
        }
    }
    SenderPolicy::new([ny, nz, nw], a).unwrap()
}

pub fn random_receiver(rng: &mut ChaCha8Rng, [nx, ny]: [usize; 2]) -> ReceiverPolicy {
    let mut b = vec![0.0; nx * ny];
    for y in 0..ny {
        let col = simplex(rng, nx);
        for x in 0..nx {
            b[x * ny + y] = col[x];
        }
    }
    ReceiverPolicy::new([nx, ny], b).unwrap()
}

/// `I` of a row-major joint, in nats.
pub fn mi(p: &[f64], rows: usize, cols: usize) -> f64 {
    let mut r = vec![0.0; rows];
    let mut c = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            r[i] += p[i * cols + j];
            c[j] += p[i * cols + j];
        }
    }
    let mut s = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let v = p[i * cols + j];
            if v > 0.0 {
                s += v * (v / (r[i] * c[j])).ln();
            }
        }
    }
    s
}

/// `E{d(X,X̂)}` by the five-fold sum.
pub fn xi(g: &GameInstance, a: &[f64], b: &ReceiverPolicy) -> f64 {
    let [nx, nz, nw] = g.joint().dims();
    let ny = g.ny();
    let mut s = 0.0;
    for x in 0..nx {
        for z in 0..nz {
            for w in 0..nw {
                let p = g.joint().get(x, z, w);
                for y in 0..ny {
                    let ay = a[(y * nz + z) * nw + w];
                    for xh in 0..nx {
                        s += g.distortion().get(x, xh) * b.get(xh, y) * ay * p;
                    }
                }
            }
        }
    }
    s
}

/// `P{Y=y, W=w}` without normalizing `a`.
pub fn pyw(g: &GameInstance, a: &[f64]) -> Vec<f64> {
    let [nx, nz, nw] = g.joint().dims();
    let ny = g.ny();
    let mut m = vec![0.0; ny * nw];
    for y in 0..ny {
        for z in 0..nz {
            for w in 0..nw {
                let pzw: f64 = (0..nx).map(|x| g.joint().get(x, z, w)).sum();
                m[y * nw + w] += a[(y * nz + z) * nw + w] * pzw;
            }
        }
    }
    m
}

pub fn zeta(g: &GameInstance, a: &[f64]) -> f64 {
    mi(&pyw(g, a), g.ny(), g.nw())
}

pub fn sender_cost(g: &GameInstance, a: &[f64], b: &ReceiverPolicy) -> f64 {
    xi(g, a, b) + g.rho() * zeta(g, a)
}

/// Sender cost extended to unnormalized `a` as `Σ M ln(M·S/(r·c))`.
pub fn sender_cost_homogeneous(g: &GameInstance, a: &[f64], b: &ReceiverPolicy) -> f64 {
    let m = pyw(g, a);
    let (ny, nw) = (g.ny(), g.nw());
    let total: f64 = m.iter().sum();
    let mut s = 0.0;
    for y in 0..ny {
        let r: f64 = (0..nw).map(|w| m[y * nw + w]).sum();
        for w in 0..nw {
            let c: f64 = (0..ny).map(|yy| m[yy * nw + w]).sum();
            let v = m[y * nw + w];
            if v > 0.0 {
                s += v * (v * total / (r * c)).ln();
            }
        }
    }
    xi(g, a, b) + g.rho() * s
}

/// Two noisy copies `W_1, W_2` of a binary `X` with exact measurements.
pub fn two_sender_binary(rho: f64) -> MultiGameInstance {
    let mut pxw = vec![0.0; 8];
    for x in 0..2 {
        for w1 in 0..2 {
            for w2 in 0..2 {
                let f = |w: usize, q: f64| if w == x { q } else { 1.0 - q };
                pxw[(x * 2 + w1) * 2 + w2] = [0.6, 0.4][x] * f(w1, 0.85) * f(w2, 0.7);
            }
        }
    }
    let joint = MultiJoint::with_perfect_measurements(space(2), vec![space(2), space(2)], &pxw).unwrap();
    MultiGameInstance::hamming(joint, rho).unwrap()
}

/// Random two-sender game on small alphabets with a general joint, returned
/// alongside that joint flattened over `(x, z1, z2, w1, w2)`.
pub fn random_two_sender(rng: &mut ChaCha8Rng) -> (MultiGameInstance, Vec<f64>) {
    let nx = rng.gen_range(2..=3);
    let nw1 = rng.gen_range(2..=3);
    let nw2 = rng.gen_range(2..=3);
    let p = simplex(rng, nx * nx * nx * nw1 * nw2);
    let joint = MultiJoint::new(space(nx), vec![space(nw1), space(nw2)], p.clone()).unwrap();
    let d = random_distortion(rng, nx);
    let rho = rng.gen_range(0.0..1.5);
    let g = MultiGameInstance::new(joint, d, vec![space(nx), space(nx)], rho).unwrap();
    (g, p)
}

pub fn random_multi_receiver(rng: &mut ChaCha8Rng, nx: usize, y_dims: Vec<usize>) -> MultiReceiverPolicy {
    let t: usize = y_dims.iter().product();
    let mut b = vec![0.0; nx * t];
    for k in 0..t {
        let col = simplex(rng, nx);
        for x in 0..nx {
            b[x * t + k] = col[x];
        }
    }
    MultiReceiverPolicy::new(nx, y_dims, b).unwrap()
}

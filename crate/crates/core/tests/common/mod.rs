//! Dense-matrix reference simulator and helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;

use num_complex::Complex64 as C;
use rand::Rng;
use vqlab::data::{self, RawImage};
use vqlab::rng::stream_rng;
use vqlab::{AnsatzSpec, Axis, Family, RotationSequence, Topology};

/// Square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Dense {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::new(1.0, 0.0);
        }
        Dense { dim, data }
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let d = self.dim;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.at(r, k);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * other.at(k, c);
                }
            }
        }
        Dense { dim: d, data }
    }

    pub fn kron(&self, other: &Dense) -> Dense {
        let d = self.dim * other.dim;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        data[(r1 * other.dim + r2) * d + c1 * other.dim + c2] =
                            self.at(r1, c1) * other.at(r2, c2);
                    }
                }
            }
        }
        Dense { dim: d, data }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }
}

pub fn rotation_matrix(axis: Axis, theta: f64) -> Dense {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let z = C::new(0.0, 0.0);
    let data = match axis {
        Axis::X => vec![C::new(c, 0.0), C::new(0.0, -s), C::new(0.0, -s), C::new(c, 0.0)],
        Axis::Y => vec![C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0)],
        Axis::Z => vec![C::new(c, -s), z, z, C::new(c, s)],
    };
    Dense { dim: 2, data }
}

/// `I ⊗ … ⊗ g ⊗ … ⊗ I` with qubit 0 as the leftmost factor.
pub fn embed_single(n: usize, q: usize, g: &Dense) -> Dense {
    let mut m = Dense::identity(1);
    for k in 0..n {
        m = if k == q { m.kron(g) } else { m.kron(&Dense::identity(2)) };
    }
    m
}

pub fn cnot_matrix(n: usize, control: usize, target: usize) -> Dense {
    let dim = 1 << n;
    let mut m = Dense {
        dim,
        data: vec![C::new(0.0, 0.0); dim * dim],
    };
    let bit = |q: usize| 1usize << (n - 1 - q);
    for i in 0..dim {
        let j = if i & bit(control) != 0 { i ^ bit(target) } else { i };
        m.data[j * dim + i] = C::new(1.0, 0.0);
    }
    m
}

/// CNOT pairs written out independently of the library.
pub fn reference_pairs(topology: Topology, n: usize) -> Vec<(usize, usize)> {
    let chain: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    match topology {
        Topology::Linear => chain,
        Topology::Circular => {
            let mut p = vec![(n - 1, 0)];
            p.extend(chain);
            p
        }
        Topology::Pairwise => {
            let mut p: Vec<_> = chain.iter().copied().filter(|&(i, _)| i % 2 == 0).collect();
            p.extend(chain.iter().copied().filter(|&(i, _)| i % 2 == 1));
            if n > 2 {
                p.push((n - 1, 0));
            }
            p
        }
        Topology::Full => {
            let mut p = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    p.push((i, j));
                }
            }
            p
        }
    }
}

/// Full circuit unitary built gate by gate.
pub fn circuit_matrix(spec: &AnsatzSpec, params: &[f64]) -> Dense {
    let n = spec.n_qubits();
    let axes = spec.rotations().axes();
    let blocks = match spec.family() {
        Family::C1 => spec.layers(),
        Family::C2 => spec.layers() + 1,
    };
    let mut u = Dense::identity(1 << n);
    let mut k = 0;
    for block in 0..blocks {
        for &axis in axes {
            for q in 0..n {
                u = embed_single(n, q, &rotation_matrix(axis, params[k])).mul(&u);
                k += 1;
            }
        }
        if block < spec.layers() {
            for (c, t) in reference_pairs(spec.topology(), n) {
                u = cnot_matrix(n, c, t).mul(&u);
            }
        }
    }
    assert_eq!(k, params.len());
    u
}

pub fn zero_vector(n: usize) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); 1 << n];
    v[0] = C::new(1.0, 0.0);
    v
}

/// Purity of qubit `k` from an explicit 2×2 partial trace.
pub fn reference_purity(amps: &[C], n: usize, k: usize) -> f64 {
    let mut rho = [[C::new(0.0, 0.0); 2]; 2];
    let bit = 1usize << (n - 1 - k);
    for i in 0..amps.len() {
        for j in 0..amps.len() {
            if (i & !bit) == (j & !bit) {
                let a = usize::from(i & bit != 0);
                let b = usize::from(j & bit != 0);
                rho[a][b] += amps[i] * amps[j].conj();
            }
        }
    }
    (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| (rho[a][b] * rho[b][a]).re)
        .sum()
}

pub fn reference_meyer_wallach(amps: &[C], n: usize) -> f64 {
    let mean: f64 = (0..n).map(|k| reference_purity(amps, n, k)).sum::<f64>() / n as f64;
    2.0 * (1.0 - mean)
}

const ROTATIONS: [&str; 12] = ["x", "y", "z", "xy", "yx", "xz", "zx", "yz", "zy", "xyz", "zyx", "yzx"];

/// Random spec with `2 ..= max_qubits` qubits, drawn from `stream` of `seed`.
pub fn random_spec(seed: u64, stream: u64, max_qubits: usize, max_layers: usize) -> AnsatzSpec {
    let mut rng = stream_rng(seed, stream);
    let family = if rng.gen_bool(0.5) { Family::C1 } else { Family::C2 };
    let n = rng.gen_range(2..=max_qubits);
    let layers = rng.gen_range(1..=max_layers);
    let rot: RotationSequence = ROTATIONS[rng.gen_range(0..ROTATIONS.len())].parse().unwrap();
    let topology = Topology::ALL[rng.gen_range(0..4)];
    AnsatzSpec::new(family, n, layers, rot, topology).unwrap()
}

pub fn random_angles(seed: u64, stream: u64, count: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream);
    (0..count).map(|_| rng.gen_range(-7.0..7.0)).collect()
}

/// Largest amplitude difference between the library and the dense oracle.
pub fn oracle_error(spec: &AnsatzSpec, params: &[f64]) -> f64 {
    let ours = spec.prepare(params).unwrap();
    let reference = circuit_matrix(spec, params).apply(&zero_vector(spec.n_qubits()));
    ours.amplitudes()
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation between the parameter-shift Jacobian and central differences.
pub fn jacobian_error(spec: &AnsatzSpec, params: &[f64], h: f64) -> f64 {
    let initial = vqlab::StateVector::<f64>::zero_state(spec.n_qubits()).unwrap();
    let jac = vqlab::learn::probability_jacobian(spec, params, &initial).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..params.len() {
        let mut p = params.to_vec();
        p[j] += h;
        let up = spec.prepare(&p).unwrap().probabilities();
        p[j] -= 2.0 * h;
        let down = spec.prepare(&p).unwrap().probabilities();
        for x in 0..up.len() {
            worst = worst.max(((up[x] - down[x]) / (2.0 * h) - jac.get(x, j)).abs());
        }
    }
    worst
}

/// Writes the four standard IDX files with `per_digit` patterned images of
/// each digit, 80% to the train pair and 20% to the test pair.
pub fn synthetic_mnist(dir: &Path, per_digit: usize) {
    let images: Vec<RawImage> = (0..10 * per_digit)
        .map(|i| {
            let label = (i % 10) as u8;
            let pixels = (0..784)
                .map(|p| {
                    let (r, c) = (p / 28, p % 28);
                    if (r + c * (label as usize + 1)) % 11 < 4 { 200 } else { (i * 7 % 30) as u8 }
                })
                .collect();
            RawImage::new(pixels, label).unwrap()
        })
        .collect();
    let (train, test) = images.split_at(8 * per_digit);
    data::write_idx(train, dir.join(data::TRAIN_IMAGES), dir.join(data::TRAIN_LABELS)).unwrap();
    data::write_idx(test, dir.join(data::TEST_IMAGES), dir.join(data::TEST_LABELS)).unwrap();
}

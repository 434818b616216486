//! Frozen outputs of small models, and the cross-resolution contract of the
//! Fourier operator.

use reachop::nn::{Activation, ArchConfig, FnoConfig, OperatorModel, Tensor, TnoConfig};

fn fno(width: usize, modes: usize, blocks: usize) -> ArchConfig {
    ArchConfig::Fno(FnoConfig {
        in_channels: 3,
        width,
        out_channels: 1,
        modes: (modes, modes),
        n_blocks: blocks,
        activation: Activation::Gelu,
    })
}

/// `[l, x1, x2]` for a disc on `[-1, 1]²`, channel-last.
fn disc_input(n: usize) -> Tensor<f64> {
    let mut data = Vec::with_capacity(n * n * 3);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (-1.0 + 2.0 * i as f64 / (n - 1) as f64, -1.0 + 2.0 * j as f64 / (n - 1) as f64);
            data.extend([(x - 0.2).hypot(y + 0.1) - 0.5, x, y]);
        }
    }
    Tensor::new(vec![n, n, 3], data).unwrap()
}

fn close(got: f64, want: f64) {
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

// values recorded from this implementation; any change to initialization,
// layer order or numerics shows up here
#[test]
fn tiny_fno_output_is_frozen() {
    let m = OperatorModel::<f64>::init(fno(4, 2, 1), 3).unwrap();
    let out = m.predict(&disc_input(8)).unwrap();
    assert_eq!(out.shape, vec![8, 8, 1]);
    for (k, want) in
        [(0, 0.19439755608491377), (9, 0.193968282324975), (27, 0.19255604897357337), (63, 0.1926554945561267)]
    {
        close(out.data[k], want);
    }
    close(out.data.iter().sum(), 12.35305742698106);
}

#[test]
fn tiny_tno_output_is_frozen() {
    let arch = ArchConfig::Tno(TnoConfig { in_channels: 3, width: 4, out_channels: 1, n_blocks: 1, mlp_hidden: 6 });
    let m = OperatorModel::<f64>::init(arch, 3).unwrap();
    let out = m.predict(&disc_input(4).reshape(vec![16, 3]).unwrap()).unwrap();
    assert_eq!(out.shape, vec![16, 1]);
    for (k, want) in [(0, -0.2224462813278672), (5, -0.21110219799831778), (15, -0.22462796661268736)] {
        close(out.data[k], want);
    }
    close(out.data.iter().sum(), -3.362_553_185_495_576_4);
}

#[test]
fn fno_transfers_across_resolution() {
    // node 3i of the 46-grid coincides with node i of the 16-grid
    let m = OperatorModel::<f64>::init(fno(8, 4, 2), 4).unwrap();
    let lo = m.predict(&disc_input(16)).unwrap();
    let hi = m.predict(&disc_input(46)).unwrap();
    assert_eq!(hi.shape, vec![46, 46, 1]);
    let mean = lo.data.iter().sum::<f64>() / lo.data.len() as f64;
    let spread = lo.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt();
    let mut diff = 0.0;
    for i in 0..16 {
        for j in 0..16 {
            diff += (lo.data[i * 16 + j] - hi.data[3 * i * 46 + 3 * j]).powi(2);
        }
    }
    assert!(diff.sqrt() < 0.1 * spread, "difference {} vs spatial spread {spread}", diff.sqrt());
}

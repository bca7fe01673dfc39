//! Exact solution of the tempered Riesz diffusion from a point mass, and the
//! semigroup property u(t1 + t2) = u(t1) * u(t2).

use tempered::spectral::{diffusion_grid, solve_riesz_diffusion};
use tempered::TemperParams;

fn main() -> tempered::Result<()> {
    let p = TemperParams::new(0.5, 1.0)?;
    let (t1, t2) = (0.4, 0.6);
    let grid = diffusion_grid(t1 + t2, &p)?;
    let u1 = solve_riesz_diffusion(t1, &grid, &p)?;
    let u2 = solve_riesz_diffusion(t2, &grid, &p)?;
    let u = solve_riesz_diffusion(t1 + t2, &grid, &p)?;
    let h = grid.step();
    let n = grid.len();
    println!("grid: {} nodes, step {h:.3e}", n);
    println!("mass {:.12}", h * u.values().iter().sum::<f64>());

    // circular convolution on the shared periodic grid; x = 0 sits at n/2
    let mid = n / 2;
    let mut worst: f64 = 0.0;
    for i in (0..n).step_by(n / 64) {
        let conv: f64 = (0..n).map(|j| u1.values()[j] * u2.values()[(i + 2 * n - j - mid) % n]).sum::<f64>() * h;
        worst = worst.max((conv - u.values()[i]).abs());
    }
    println!("semigroup defect (64 nodes): {worst:.2e}");
    for i in [mid, mid + n / 64, mid + n / 16] {
        println!("u({:.3}, {}) = {:.8}", grid.point(i), t1 + t2, u.values()[i]);
    }
    Ok(())
}

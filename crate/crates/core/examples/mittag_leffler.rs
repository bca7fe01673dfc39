//! E_{1/2}(-z) = e^{z^2} erfc(z) and its Laplace transform in t along
//! z = xi sqrt(t): lambda^{-1/2} / (xi + sqrt(lambda)).

use tempered::processes::mittag_leffler_half;
use tempered::quad::integrate;

fn main() -> tempered::Result<()> {
    for z in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
        println!("E(-{z}) = {:.16}", mittag_leffler_half(z)?);
    }
    println!();
    for lambda in [0.5, 1.0, 2.0, 4.0] {
        for xi in [0.5, 1.0, 2.0] {
            // t = s^2 removes the sqrt(t) kink at the origin
            let f = |s: f64| 2.0 * s * (-lambda * s * s).exp() * mittag_leffler_half(xi * s).unwrap_or(f64::NAN);
            let num = integrate(f, 0.0, (80.0 / lambda).sqrt(), 64, 1e-13, 4000)?.value;
            let exact = 1.0 / (lambda.sqrt() * (xi + lambda.sqrt()));
            println!("lambda {lambda:>4} xi {xi:>4}: {num:.12} vs {exact:.12}  ({:.1e})", (num - exact).abs());
        }
    }
    Ok(())
}

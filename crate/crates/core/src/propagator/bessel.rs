/// J_0(x) … J_nmax(x) for x ≥ 0 by Miller's backward recurrence,
/// normalized with J_0 + 2 Σ J_2k = 1.
pub fn bessel_j_sequence(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = (nmax as f64).max(x);
    let mut m = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    m += m % 2;
    let (mut j_next, mut j) = (0.0f64, 1e-300f64);
    let mut sum = 0.0;
    for n in (1..=m).rev() {
        // j = J_n, j_next = J_{n+1}
        if n <= nmax {
            out[n] = j;
        }
        if n % 2 == 0 {
            sum += 2.0 * j;
        }
        let j_prev = 2.0 * n as f64 / x * j - j_next;
        j_next = j;
        j = j_prev;
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            j_next *= s;
            sum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out[0] = j;
    sum += j;
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let cases = [
            (0, 1.0, 0.7651976865579666),
            (1, 1.0, 0.44005058574493355),
            (5, 10.0, -0.2340615281867936),
            (0, 100.0, 0.01998585030422312),
            (10, 50.0, -0.11384784914946938),
            (60, 40.0, 1.309267138298205e-07),
            (150, 200.0, -0.03159355927345776),
            (3, 0.001, 2.083333203125009e-11),
        ];
        for (n, x, want) in cases {
            let got = bessel_j_sequence(x, n.max(1))[n];
            assert!((got - want).abs() <= 1e-13 + 1e-10 * want.abs(), "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_j_sequence(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }
}

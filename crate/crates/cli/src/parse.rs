//! Textual inputs: complex numbers, matrices and theta characteristics.
//!
//! Matrices are written row by row, rows separated by `;` and entries by `,`:
//! `"1i,0.5;0.5,2i"`. Complex entries accept `a`, `bi`, `a+bi` and `a-bi`.

use num_complex::Complex64;
use siegelkit::numeric::CMat;
use siegelkit::thetaforms::ThetaCharacteristic;

pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|e| format!("{s}: {e}"));
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|e| format!("{s}: {e}")),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn rows(s: &str) -> Vec<Vec<&str>> {
    s.split(';').map(|r| r.split(',').map(str::trim).collect()).collect()
}

pub fn complex_matrix(s: &str) -> Result<CMat, String> {
    let r = rows(s);
    let n = r.len();
    if r.iter().any(|row| row.len() != n) {
        return Err(format!("matrix {s:?} is not square"));
    }
    let mut m = CMat::zeros(n, n);
    for (i, row) in r.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = complex(e)?;
        }
    }
    Ok(m)
}

/// Integer rows of any shape.
pub fn int_rows(s: &str) -> Result<Vec<Vec<i64>>, String> {
    rows(s)
        .iter()
        .map(|row| row.iter().map(|e| e.parse::<i64>().map_err(|err| format!("{e}: {err}"))).collect())
        .collect()
}

pub fn int_matrix(s: &str) -> Result<Vec<Vec<i64>>, String> {
    let out = int_rows(s)?;
    let n = out.len();
    if out.iter().any(|row| row.len() != n) {
        return Err(format!("matrix {s:?} is not square"));
    }
    Ok(out)
}

/// `"a:b"` with bit strings `a`, `b`, e.g. `"10:01"`.
pub fn characteristic(s: &str) -> Result<ThetaCharacteristic, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("characteristic {s:?} must look like 10:01"))?;
    let bits = |x: &str| -> Result<Vec<u8>, String> {
        x.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(format!("bad bit {c:?} in {s:?}")),
            })
            .collect()
    };
    ThetaCharacteristic::new(bits(a)?, bits(b)?).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(complex("-1.5i").unwrap(), Complex64::new(0.0, -1.5));
        assert_eq!(complex("0.5+2i").unwrap(), Complex64::new(0.5, 2.0));
        assert_eq!(complex("-0.5-i").unwrap(), Complex64::new(-0.5, -1.0));
        assert_eq!(complex("1e-3+2e-1i").unwrap(), Complex64::new(1e-3, 0.2));
        assert!(complex("x").is_err());
    }

    #[test]
    fn matrices() {
        let m = complex_matrix("1i, 0.5; 0.5, 2i").unwrap();
        assert_eq!(m[(1, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(int_matrix("1,1;0,1").unwrap(), vec![vec![1, 1], vec![0, 1]]);
        assert!(int_matrix("1,1;0").is_err());
    }

    #[test]
    fn characteristics() {
        let c = characteristic("10:01").unwrap();
        assert_eq!(c.top(), &[1, 0]);
        assert!(characteristic("12:00").is_err());
        assert!(characteristic("10").is_err());
    }
}

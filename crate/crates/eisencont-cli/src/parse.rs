use eisencont::C64;

use crate::CliError;

fn bad(what: &str, text: &str) -> CliError {
    CliError::Usage(format!("cannot parse {what} from {text:?}"))
}

/// `2`, `-0.5`, `3i`, `0.6+0.25i`, `1e-3-2i`.
pub fn complex(text: &str) -> Result<C64, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("a complex number", text));
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().map(|re| C64::new(re, 0.0)).map_err(|_| bad("a complex number", text));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64, CliError> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad("a complex number", text)),
        }
    };
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad("a complex number", text))?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// `x,y`.
pub fn point(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => Ok((x.parse().map_err(|_| bad("x", text))?, y.parse().map_err(|_| bad("y", text))?)),
        _ => Err(bad("a point x,y", text)),
    }
}

/// `from,to,count` as `count` equally spaced values (endpoints included).
pub fn range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad("a range from,to,count", text));
    };
    let a: f64 = a.parse().map_err(|_| bad("a range start", text))?;
    let b: f64 = b.parse().map_err(|_| bad("a range end", text))?;
    let n: usize = n.parse().map_err(|_| bad("a range count", text))?;
    match n {
        0 => Err(CliError::Usage(format!("empty range {text:?}"))),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
    }
}

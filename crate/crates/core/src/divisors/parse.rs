//! Text forms of cusps and of divisors supported on cusps and fixed points,
//! e.g. `3*b_0 - 3*c2_0` or `[P] + [Q] - 2[c1_0]`.

use super::Divisor;
use crate::arith::Scalar;
use crate::divisors::CuspFamily;
use crate::error::{HgcError, Result};
use crate::local_series::Point;

/// `a_i`, `b_i`, `c1_i`, `c2_i`, `P`, `Q`, `g^(r,s)P` or `g^(r,s)Q`.
pub fn parse_point<Sc: Scalar>(s: &str) -> Result<Point<Sc>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    let bad = || HgcError::Parse(format!("cannot read point {s:?}"));
    if let Some(rest) = s.strip_prefix("g^(") {
        let (rs, base) = rest.split_once(')').ok_or_else(bad)?;
        let (r, t) = rs.split_once(',').ok_or_else(bad)?;
        let r: i64 = r.trim().parse().map_err(|_| bad())?;
        let t: i64 = t.trim().parse().map_err(|_| bad())?;
        return match base.trim() {
            "P" => Ok(Point::Fixed { q: false, r, s: t }),
            "Q" => Ok(Point::Fixed { q: true, r, s: t }),
            _ => Err(bad()),
        };
    }
    match s {
        "P" => return Ok(Point::P),
        "Q" => return Ok(Point::Q),
        _ => {}
    }
    let (fam, idx) = s.split_once('_').ok_or_else(bad)?;
    let i: i64 = idx.parse().map_err(|_| bad())?;
    Ok(fam.parse::<CuspFamily>()?.point(i))
}

/// A signed sum of `k*point` / `k[point]` terms.
pub fn parse_divisor<Sc: Scalar>(s: &str) -> Result<Divisor<Sc>> {
    let mut d = Divisor::zero();
    let mut sign = 1i64;
    let mut rest = s.trim();
    if rest.is_empty() || rest == "0" {
        return Ok(d);
    }
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
            continue;
        }
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            continue;
        }
        let end = term_end(rest);
        let term = rest[..end].trim();
        if term.is_empty() {
            return Err(HgcError::Parse(format!("empty term in {s:?}")));
        }
        let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
        let (k, pt) = if digits > 0 {
            let k: i64 = term[..digits].parse().map_err(|_| HgcError::Parse(term.to_string()))?;
            (k, term[digits..].trim_start().trim_start_matches('*'))
        } else {
            (1, term)
        };
        d.add_point(parse_point(pt)?, sign * k);
        sign = 1;
        rest = &rest[end..];
        if rest.trim().is_empty() {
            return Ok(d);
        }
    }
}

/// End of the term at the start of `s`: the next `+`/`-` outside brackets/parentheses.
fn term_end(s: &str) -> usize {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return i,
            _ => {}
        }
    }
    s.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Fp;

    #[test]
    fn reads_divisors() {
        let d: Divisor<Fp> = parse_divisor("3*b_0 - 3*c2_0").unwrap();
        assert_eq!(d.coeff(&Point::B(0)), 3);
        assert_eq!(d.coeff(&Point::C2(0)), -3);
        let e: Divisor<Fp> = parse_divisor("[P] + [Q] - 2[c1_0] + g^(1,-1)P").unwrap();
        assert_eq!(e.coeff(&Point::C1(0)), -2);
        assert_eq!(e.coeff(&Point::Fixed { q: false, r: 1, s: -1 }), 1);
        assert!(parse_divisor::<Fp>("3*d_0").is_err());
        assert!(parse_divisor::<Fp>("0").unwrap().is_zero());
    }
}

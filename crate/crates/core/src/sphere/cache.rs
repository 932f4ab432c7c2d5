//! Binary cache of harmonic bases.
//!
//! Layout (little endian): magic `HBAS`, u32 version, u32 n, u32 p, u32 q,
//! u32 d, u32 monomial count N, then d·N coefficients row-major, then the d
//! squared norms. Each rational is a numerator followed by a denominator,
//! each big integer a sign byte (0 or 1), a u32 byte length and the
//! magnitude bytes. Monomial order is implied by (n, p, q).

use std::io::{Read, Write};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::Zero;

use super::{bidegree_monomials, HarmonicBasis};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 4] = b"HBAS";
pub const CACHE_VERSION: u32 = 1;

fn io(e: std::io::Error) -> Error {
    Error::Cache(e.to_string())
}

fn put_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes()).map_err(io)
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io)?;
    Ok(u32::from_le_bytes(b))
}

fn put_int<W: Write>(w: &mut W, v: &BigInt) -> Result<()> {
    let (sign, mag) = v.to_bytes_le();
    w.write_all(&[u8::from(sign == Sign::Minus)]).map_err(io)?;
    let mag = if v.is_zero() { Vec::new() } else { mag };
    put_u32(w, mag.len() as u32)?;
    w.write_all(&mag).map_err(io)
}

fn get_int<R: Read>(r: &mut R) -> Result<BigInt> {
    let mut s = [0u8; 1];
    r.read_exact(&mut s).map_err(io)?;
    let len = get_u32(r)? as usize;
    let mut mag = vec![0u8; len];
    r.read_exact(&mut mag).map_err(io)?;
    let sign = match s[0] {
        0 => Sign::Plus,
        1 => Sign::Minus,
        other => return Err(Error::Cache(format!("bad sign byte {other}"))),
    };
    Ok(BigInt::from_bytes_le(sign, &mag))
}

fn put_rat<W: Write>(w: &mut W, v: &BigRational) -> Result<()> {
    put_int(w, v.numer())?;
    put_int(w, v.denom())
}

fn get_rat<R: Read>(r: &mut R) -> Result<BigRational> {
    let num = get_int(r)?;
    let den = get_int(r)?;
    if den.is_zero() {
        return Err(Error::Cache("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

pub fn write_cache<W: Write>(w: &mut W, basis: &HarmonicBasis) -> Result<()> {
    w.write_all(CACHE_MAGIC).map_err(io)?;
    put_u32(w, CACHE_VERSION)?;
    for v in [basis.n, basis.p, basis.q, basis.dim(), basis.monomials.len()] {
        put_u32(w, v as u32)?;
    }
    for row in &basis.coeffs {
        for c in row {
            put_rat(w, c)?;
        }
    }
    for s in &basis.sq_norms {
        put_rat(w, s)?;
    }
    Ok(())
}

pub fn read_cache<R: Read>(r: &mut R) -> Result<HarmonicBasis> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = get_u32(r)?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let n = get_u32(r)? as usize;
    let p = get_u32(r)? as usize;
    let q = get_u32(r)? as usize;
    let d = get_u32(r)? as usize;
    let count = get_u32(r)? as usize;
    if n < 2 {
        return Err(Error::Cache(format!("invalid dimension n = {n}")));
    }
    let monomials = bidegree_monomials(n, p, q);
    if monomials.len() != count {
        return Err(Error::Cache(format!("monomial count {count} does not match (n, p, q)")));
    }
    let mut coeffs = Vec::with_capacity(d);
    for _ in 0..d {
        let row = (0..count).map(|_| get_rat(r)).collect::<Result<Vec<_>>>()?;
        coeffs.push(row);
    }
    let sq_norms = (0..d).map(|_| get_rat(r)).collect::<Result<Vec<_>>>()?;
    Ok(HarmonicBasis::assemble(n, p, q, monomials, coeffs, sq_norms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_harmonic_basis;

    #[test]
    fn round_trip_and_corruption() {
        let b = build_harmonic_basis(3, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_cache(&mut buf, &b).unwrap();
        assert_eq!(&buf[..4], CACHE_MAGIC);
        let back = read_cache(&mut buf.as_slice()).unwrap();
        assert_eq!(back.coeffs(), b.coeffs());
        assert_eq!(back.sq_norms(), b.sq_norms());
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(read_cache(&mut bad.as_slice()).is_err());
        assert!(read_cache(&mut &buf[..buf.len() - 3]).is_err());
    }
}

//! The scheme as a generic CF code, for evaluation by the channel-level
//! error machinery.

use super::coding::{decode, psi2, CfOutput};
use super::word::{self, low_bits};
use super::{Codebook, SchemeError, SchemeParams};
use crate::mac::code::{CfCode, CfTables};
use crate::mac::dueck::{dueck_mac, X1_LOWER_A};
use crate::mac::DiscreteMac;

/// Largest `M1 M2` materialized as facilitator tables.
pub const CF_TABLE_CAP: u64 = 1 << 22;

/// Sentinel decoder output for blocks the scheme refuses to decode.
pub const DECODE_FAILURE: (usize, usize) = (usize::MAX, usize::MAX);

/// Builds the full tables: both encoders forward their messages, the
/// first encoder's CF output is constant, and the second receives the
/// packed `k`-bit word. Pairs whose list overflows get index 0, so they
/// fail exactly when the scheme reports an overflow.
pub fn scheme_cf_code<'a>(
    params: &'a SchemeParams,
    codebook: &'a Codebook,
) -> Result<(DiscreteMac, CfCode<impl Fn(&[usize]) -> (usize, usize) + Sync + 'a>), SchemeError> {
    let (m1, m2) = (codebook.m1(), params.m2());
    if (m1 as u128) * (m2 as u128) > CF_TABLE_CAP as u128 {
        return Err(SchemeError::ExhaustiveCapExceeded { pairs: m1 as f64 * m2 as f64, cap: CF_TABLE_CAP });
    }
    let (m1, m2) = (m1 as usize, m2 as usize);
    let n = params.n;
    let k2_out = 1usize << params.k;
    let mut psi2_table = Vec::with_capacity(m1 * m2);
    for w1 in 0..m1 {
        for w2 in 0..m2 {
            let cf = match psi2(w1 as u64, w2 as u64, codebook, params) {
                Ok(cf) => cf,
                Err(SchemeError::ListOverflow { .. }) => {
                    let x1 = codebook.codeword(w1 as u64);
                    CfOutput::new(super::coding::psi21(x1, w2 as u64, params.n1), 0, params)
                }
                Err(e) => return Err(e),
            };
            psi2_table.push(cf.packed as usize);
        }
    }
    let mut f1 = Vec::with_capacity(m1 * n);
    for w1 in 0..m1 {
        f1.extend(word::to_symbols(codebook.codeword(w1 as u64), params.n1));
        f1.extend(std::iter::repeat(X1_LOWER_A).take(params.n2));
    }
    let mut f2 = Vec::with_capacity(m2 * k2_out * n);
    for w2 in 0..m2 as u64 {
        for z in 0..k2_out as u64 {
            let cf = CfOutput::unpack(z, params);
            let sent = if cf.psi21 == 1 { !w2 & low_bits(params.n1) } else { w2 };
            f2.extend((0..params.n1).map(|i| ((sent >> i) & 1) as usize));
            f2.extend((0..params.n2).map(|t| ((cf.psi22 as u64 >> (params.n2 - 1 - t)) & 1) as usize));
        }
    }
    let tables = CfTables {
        n,
        m1,
        m2,
        k1_in: m1,
        k2_in: m2,
        k1_out: 1,
        k2_out,
        phi1: (0..m1).collect(),
        phi2: (0..m2).collect(),
        psi1: vec![0; m1 * m2],
        psi2: psi2_table,
        f1,
        f2,
    };
    let mac = dueck_mac();
    let decoder = move |y: &[usize]| match decode(y, codebook, params) {
        Ok((w1, w2)) => (w1 as usize, w2 as usize),
        Err(_) => DECODE_FAILURE,
    };
    let code = CfCode::new(&mac, tables, decoder)?;
    Ok((mac, code))
}

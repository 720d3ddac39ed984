//! CF bit functions, two-phase encoders, list decoder and disambiguation.

use serde::{Deserialize, Serialize};

use super::word::{low_bits, Phase1Output};
use super::{Codebook, SchemeError, SchemeParams};
use crate::mac::dueck::{self, X1_LOWER_A};

/// What the facilitator sends to the second encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfOutput {
    /// 1 when the unflipped phase-1 output would be bad.
    pub psi21: u8,
    /// Position of the message pair in the sorted list of the true output.
    pub psi22: usize,
    /// `psi21` followed by the `k - 1` bits of `psi22`.
    pub packed: u64,
}

impl CfOutput {
    pub fn new(psi21: u8, psi22: usize, params: &SchemeParams) -> Self {
        CfOutput { psi21, psi22, packed: ((psi21 as u64) << params.index_bits()) | psi22 as u64 }
    }

    pub fn unpack(packed: u64, params: &SchemeParams) -> Self {
        let bits = params.index_bits();
        CfOutput { psi21: (packed >> bits) as u8 & 1, psi22: (packed & low_bits(bits)) as usize, packed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListDecodeResult {
    /// `(w1, w2)` ascending.
    pub entries: Vec<(u64, u64)>,
    pub overflow: bool,
}

/// Packed channel inputs of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    pub x1_phase1: u64,
    pub x2_phase1: u64,
    /// Phase-2 `x2`, most significant bit first: coordinate `t` of phase 2
    /// is bit `n2 - 1 - t`.
    pub x2_phase2: u64,
    pub cf: CfOutput,
}

impl Encoded {
    pub fn phase1_output(&self, n1: usize) -> Phase1Output {
        Phase1Output::of(self.x1_phase1, self.x2_phase1, n1)
    }

    /// Full-length input words over the channel alphabets.
    pub fn to_symbols(&self, params: &SchemeParams) -> (Vec<usize>, Vec<usize>) {
        let mut x1 = super::word::to_symbols(self.x1_phase1, params.n1);
        x1.extend(std::iter::repeat(X1_LOWER_A).take(params.n2));
        let mut x2: Vec<usize> = (0..params.n1).map(|i| ((self.x2_phase1 >> i) & 1) as usize).collect();
        x2.extend((0..params.n2).map(|t| ((self.x2_phase2 >> (params.n2 - 1 - t)) & 1) as usize));
        (x1, x2)
    }
}

fn check_messages(w1: u64, w2: u64, codebook: &Codebook, params: &SchemeParams) -> Result<(), SchemeError> {
    if w1 >= codebook.m1() || w2 >= params.m2() {
        return Err(SchemeError::MessageOutOfRange { w1, w2 });
    }
    Ok(())
}

/// The flip bit: 0 iff sending `w2` unchanged yields a good output.
pub fn psi21(x1: u64, w2: u64, n1: usize) -> u8 {
    u8::from(!Phase1Output::of(x1, w2, n1).is_good())
}

fn flip_mask(psi21: u8, n1: usize) -> u64 {
    if psi21 == 1 {
        low_bits(n1)
    } else {
        0
    }
}

/// Sorted list of message pairs consistent with a good phase-1 output.
pub fn list_decode_phase1(
    out: &Phase1Output,
    codebook: &Codebook,
    params: &SchemeParams,
) -> Result<ListDecodeResult, SchemeError> {
    if !out.is_good() {
        return Err(SchemeError::BadOutput { erasures: out.erasure_count(), n1: out.n1 });
    }
    let n1 = params.n1;
    let hits: Vec<(u64, u64)> = out.preimage_words().filter_map(|x| codebook.message_of(x).map(|w1| (w1, x))).collect();
    let mut entries = Vec::with_capacity(2 * hits.len());
    for flip in [0u8, 1] {
        let w2 = out.y2 ^ flip_mask(flip, n1);
        for &(w1, x1) in &hits {
            // the hypothesis must reproduce the flip that was applied
            if psi21(x1, w2, n1) == flip {
                entries.push((w1, w2));
            }
        }
    }
    entries.sort_unstable();
    let overflow = entries.len() > params.ell;
    Ok(ListDecodeResult { entries, overflow })
}

/// Facilitator output for the second encoder.
pub fn psi2(w1: u64, w2: u64, codebook: &Codebook, params: &SchemeParams) -> Result<CfOutput, SchemeError> {
    check_messages(w1, w2, codebook, params)?;
    let x1 = codebook.codeword(w1);
    let flip = psi21(x1, w2, params.n1);
    let out = Phase1Output::of(x1, w2 ^ flip_mask(flip, params.n1), params.n1);
    let list = list_decode_phase1(&out, codebook, params)?;
    if list.overflow {
        return Err(SchemeError::ListOverflow { len: list.entries.len(), ell: params.ell });
    }
    let psi22 = list.entries.binary_search(&(w1, w2)).map_err(|_| SchemeError::NotInList { w1, w2 })?;
    Ok(CfOutput::new(flip, psi22, params))
}

/// Both encoders together.
pub fn encode(w1: u64, w2: u64, codebook: &Codebook, params: &SchemeParams) -> Result<Encoded, SchemeError> {
    let cf = psi2(w1, w2, codebook, params)?;
    Ok(Encoded {
        x1_phase1: codebook.codeword(w1),
        x2_phase1: w2 ^ flip_mask(cf.psi21, params.n1),
        x2_phase2: cf.psi22 as u64,
        cf,
    })
}

/// Outcome of decoding one block, with the list it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub pair: (u64, u64),
    pub list: ListDecodeResult,
}

/// Decodes from the packed phase-1 output and the phase-2 `y2` bits.
pub fn decode_parts(
    out: &Phase1Output,
    y2_phase2: u64,
    codebook: &Codebook,
    params: &SchemeParams,
) -> Result<Decoded, SchemeError> {
    let list = list_decode_phase1(out, codebook, params)?;
    if list.overflow {
        return Err(SchemeError::ListOverflow { len: list.entries.len(), ell: params.ell });
    }
    let index = (y2_phase2 & low_bits(params.index_bits())) as usize;
    match list.entries.get(index) {
        Some(&pair) => Ok(Decoded { pair, list }),
        None => Err(SchemeError::IndexOutOfList { index, len: list.entries.len() }),
    }
}

/// Decodes a full output word over the joint output alphabet.
pub fn decode(y: &[usize], codebook: &Codebook, params: &SchemeParams) -> Result<(u64, u64), SchemeError> {
    if y.len() != params.n {
        return Err(SchemeError::InvalidOutput(format!("expected {} symbols, got {}", params.n, y.len())));
    }
    let out = Phase1Output::from_symbols(&y[..params.n1])?;
    let y2_phase2 = y[params.n1..].iter().try_fold(0u64, |acc, &sym| {
        if sym >= dueck::Y1_SIZE * dueck::Y2_SIZE {
            return Err(SchemeError::InvalidOutput(format!("output symbol {sym} out of range")));
        }
        Ok((acc << 1) | dueck::split_y(sym).1 as u64)
    })?;
    Ok(decode_parts(&out, y2_phase2, codebook, params)?.pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::apply_n;
    use crate::mac::dueck::dueck_mac;
    use crate::scheme::{derive_params, gen_codebook};
    use crate::seed;
    use rand::Rng;

    fn small() -> (SchemeParams, Codebook) {
        let p = derive_params(16, 0.25, 0.75).unwrap();
        let cb = gen_codebook(&p, 1).unwrap();
        (p, cb)
    }

    #[test]
    fn packing() {
        let (p, _) = small();
        let cf = CfOutput::new(1, 5, &p);
        assert_eq!(cf.packed, 0b1101);
        assert!(cf.packed < 1 << p.k);
        assert_eq!(CfOutput::unpack(cf.packed, &p), cf);
    }

    #[test]
    fn phase_two_padding() {
        let (p, _) = small();
        let e = Encoded { x1_phase1: 0, x2_phase1: 0, x2_phase2: 5, cf: CfOutput::new(0, 5, &p) };
        let (x1, x2) = e.to_symbols(&p);
        assert_eq!(&x2[p.n1..], &[0, 1, 0, 1]);
        assert!(x1[p.n1..].iter().all(|&s| s == X1_LOWER_A));
        assert_eq!((x1.len(), x2.len()), (p.n, p.n));
    }

    #[test]
    fn round_trip_through_channel() {
        let (p, cb) = small();
        let mac = dueck_mac();
        let mut rng = seed::stream(3, &[]);
        let mut decoded = 0;
        for _ in 0..2000 {
            let (w1, w2) = (rng.gen_range(0..p.m1()), rng.gen_range(0..p.m2()));
            match encode(w1, w2, &cb, &p) {
                Ok(e) => {
                    if e.cf.psi21 == 0 {
                        assert_eq!(e.x2_phase1, w2);
                    }
                    assert!(e.phase1_output(p.n1).is_good());
                    let (x1, x2) = e.to_symbols(&p);
                    let y = apply_n(&mac, &x1, &x2, &mut rng).unwrap();
                    assert_eq!(decode(&y, &cb, &p).unwrap(), (w1, w2));
                    decoded += 1;
                }
                Err(SchemeError::ListOverflow { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(decoded > 1000);
    }

    #[test]
    fn list_entries_reencode() {
        let (p, cb) = small();
        let mut rng = seed::stream(4, &[]);
        for _ in 0..500 {
            let (w1, w2) = (rng.gen_range(0..p.m1()), rng.gen_range(0..p.m2()));
            let x1 = cb.codeword(w1);
            let flip = psi21(x1, w2, p.n1);
            let out = Phase1Output::of(x1, w2 ^ flip_mask(flip, p.n1), p.n1);
            let list = list_decode_phase1(&out, &cb, &p).unwrap();
            assert!(list.entries.contains(&(w1, w2)));
            assert!(list.entries.windows(2).all(|e| e[0] < e[1]));
            for &(a, b) in &list.entries {
                let xa = cb.codeword(a);
                let f = psi21(xa, b, p.n1);
                assert_eq!(Phase1Output::of(xa, b ^ flip_mask(f, p.n1), p.n1), out);
            }
            // a word and its complement give the same output unless the
            // erasures split evenly
            let hits = list.entries.iter().filter(|e| e.1 == out.y2).count();
            let both = 2 * out.erasure_count() < p.n1;
            assert_eq!(list.entries.len(), if both { 2 * hits } else { hits });
            if out.erasure_count() == 0 {
                assert_eq!(list.entries, vec![(w1, out.y2), (w1, !out.y2 & low_bits(p.n1))]);
            }
        }
    }

    #[test]
    fn bad_output_and_out_of_range() {
        let (p, cb) = small();
        // every coordinate erased
        let out = Phase1Output::of(0, 0, p.n1);
        assert!(matches!(list_decode_phase1(&out, &cb, &p), Err(SchemeError::BadOutput { .. })));
        assert!(matches!(psi2(p.m1(), 0, &cb, &p), Err(SchemeError::MessageOutOfRange { .. })));
    }
}

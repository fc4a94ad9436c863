//! `LWG1` binary model format.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic        4 bytes  "LWG1"
//! version      u16      FORMAT_VERSION
//! layer_count  u16
//! headers      layer_count × { in_dim u32, out_dim u32, activation u8 }
//! payload      per layer: weights (in_dim × out_dim f32, row-major), then bias (out_dim f32)
//! crc32        u32      IEEE CRC-32 of every preceding byte
//! ```
//!
//! Activation codes: 0 identity, 1 leaky ReLU, 2 ReLU, 3 tanh, 4 sigmoid.

use alloc::format;
use alloc::vec::Vec;

use crate::nn::{Activation, DenseLayer, Network};
use crate::tensor::Matrix;
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"LWG1";
pub const FORMAT_VERSION: u16 = 1;

const PREAMBLE_LEN: usize = 8;
const LAYER_HEADER_LEN: usize = 9;
const CRC_LEN: usize = 4;

/// Exact encoded size of a network with the given `(in, out)` layer dims.
pub fn encoded_len(dims: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut len = PREAMBLE_LEN + CRC_LEN;
    for (i, o) in dims {
        len += LAYER_HEADER_LEN + 4 * (i * o + o);
    }
    len
}

pub fn save(net: &Network) -> Vec<u8> {
    let layers = net.layers();
    let mut out = Vec::with_capacity(encoded_len(layers.iter().map(|l| (l.in_dim(), l.out_dim()))));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let count = u16::try_from(layers.len()).expect("at most u16::MAX layers");
    out.extend_from_slice(&count.to_le_bytes());
    for l in layers {
        out.extend_from_slice(&(l.in_dim() as u32).to_le_bytes());
        out.extend_from_slice(&(l.out_dim() as u32).to_le_bytes());
        out.push(l.activation.code());
    }
    for l in layers {
        for v in l.weights.as_slice().iter().chain(l.bias.as_slice()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn need(bytes: &[u8], expected: usize) -> Result<()> {
    if bytes.len() < expected {
        return Err(Error::Length {
            expected,
            actual: bytes.len(),
        });
    }
    Ok(())
}

struct LayerHeader {
    in_dim: usize,
    out_dim: usize,
    activation: u8,
}

/// Decodes a network, checking in order: magic, declared length, checksum,
/// version, activation codes, and dimension chaining.
pub fn load(bytes: &[u8]) -> Result<Network> {
    need(bytes, MAGIC.len())?;
    if bytes[..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:02x?}", &bytes[..4])));
    }
    need(bytes, PREAMBLE_LEN)?;
    let version = u16_at(bytes, 4);
    let count = u16_at(bytes, 6) as usize;
    let headers_end = PREAMBLE_LEN + count * LAYER_HEADER_LEN;
    need(bytes, headers_end + CRC_LEN)?;

    let headers: Vec<LayerHeader> = (0..count)
        .map(|i| {
            let at = PREAMBLE_LEN + i * LAYER_HEADER_LEN;
            LayerHeader {
                in_dim: u32_at(bytes, at) as usize,
                out_dim: u32_at(bytes, at + 4) as usize,
                activation: bytes[at + 8],
            }
        })
        .collect();

    let overflow = Error::Length {
        expected: usize::MAX,
        actual: bytes.len(),
    };
    let mut expected = headers_end + CRC_LEN;
    for h in &headers {
        let floats = h
            .in_dim
            .checked_mul(h.out_dim)
            .and_then(|w| w.checked_add(h.out_dim))
            .ok_or_else(|| overflow.clone())?;
        expected = floats
            .checked_mul(4)
            .and_then(|b| b.checked_add(expected))
            .ok_or_else(|| overflow.clone())?;
    }
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            actual: bytes.len(),
        });
    }

    let body = &bytes[..bytes.len() - CRC_LEN];
    let stored = u32_at(bytes, body.len());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Corruption { stored, computed });
    }

    if version != FORMAT_VERSION {
        return Err(Error::Version(format!("format version {version}")));
    }
    if count == 0 {
        return Err(Error::Format("model has no layers".into()));
    }

    let mut cursor = headers_end;
    let mut floats = |n: usize| -> Vec<f32> {
        let v = bytes[cursor..cursor + 4 * n]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        cursor += 4 * n;
        v
    };
    let mut layers = Vec::with_capacity(count);
    for (i, h) in headers.iter().enumerate() {
        let activation = Activation::from_code(h.activation)
            .ok_or_else(|| Error::Version(format!("unknown activation code {} in layer {i}", h.activation)))?;
        if h.in_dim == 0 || h.out_dim == 0 {
            return Err(Error::Format(format!("layer {i} has a zero dimension")));
        }
        let weights = Matrix::new(h.in_dim, h.out_dim, floats(h.in_dim * h.out_dim))?;
        let bias = Matrix::new(1, h.out_dim, floats(h.out_dim))?;
        layers.push(DenseLayer::new(weights, bias, activation)?);
    }
    Network::new(layers).map_err(|e| match e {
        Error::Shape { .. } => Error::Format("layer dimensions do not chain".into()),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Rng;
    use alloc::vec;

    fn tiny() -> Network {
        let layer = DenseLayer::new(
            Matrix::from_rows(&[[2.0]]),
            Matrix::from_rows(&[[3.0]]),
            Activation::Identity,
        )
        .unwrap();
        Network::new(vec![layer]).unwrap()
    }

    fn small(seed: u64) -> Network {
        Network::ladder(
            &[5, 4, 3],
            Activation::LeakyRelu,
            Activation::Sigmoid,
            &mut Rng::new(seed),
        )
        .unwrap()
    }

    /// Re-seals a modified body with a valid checksum.
    fn reseal(mut bytes: Vec<u8>) -> Vec<u8> {
        let n = bytes.len() - 4;
        let crc = crc32fast::hash(&bytes[..n]);
        bytes[n..].copy_from_slice(&crc.to_le_bytes());
        bytes
    }

    #[test]
    fn tiny_layout() {
        let bytes = save(&tiny());
        assert_eq!(bytes.len(), 4 + 2 + 2 + (4 + 4 + 1) + 8 + 4);
        assert_eq!(&bytes[..4], b"LWG1");
        assert_eq!(&bytes[4..8], &[1, 0, 1, 0]);
        assert_eq!(&bytes[8..17], &[1, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(&bytes[17..21], &2.0f32.to_le_bytes());
        assert_eq!(&bytes[21..25], &3.0f32.to_le_bytes());
        // same bytes as the example in FORMAT.md
        assert_eq!(&bytes[25..], &[0xc5, 0x84, 0x96, 0x64]);
        assert_eq!(bytes.len(), encoded_len([(1, 1)]));
    }

    #[test]
    fn generator_size() {
        let g = Network::default_generator(&mut Rng::new(0));
        let bytes = save(&g);
        assert_eq!(bytes.len(), 8 + 4 * 9 + 4 * 1_486_352 + 4);
        assert_eq!(load(&bytes).unwrap(), g);
    }

    #[test]
    fn fixpoint() {
        let bytes = save(&small(1));
        assert_eq!(save(&load(&bytes).unwrap()), bytes);
    }

    #[test]
    fn forward_bit_exact_after_round_trip() {
        let net = small(2);
        let back = load(&save(&net)).unwrap();
        let x = Matrix::randn(&mut Rng::new(3), 100, 5);
        let a = net.predict(&x).unwrap();
        let b = back.predict(&x).unwrap();
        assert!(a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn every_payload_byte_is_checked() {
        let bytes = save(&small(4));
        let payload_start = 8 + 2 * 9;
        for i in payload_start..bytes.len() - 4 {
            let mut bad = bytes.clone();
            bad[i] ^= 0x01;
            assert!(matches!(load(&bad), Err(Error::Corruption { .. })), "byte {i}");
        }
    }

    #[test]
    fn malformed_classes() {
        let bytes = save(&small(5));

        let mut onnx = bytes.clone();
        onnx[..4].copy_from_slice(b"ONNX");
        assert!(matches!(load(&onnx), Err(Error::Format(_))));
        assert!(matches!(load(b"ONNX"), Err(Error::Format(_))));

        for cut in [0, 2, 7, 20, bytes.len() - 1] {
            assert!(matches!(load(&bytes[..cut]), Err(Error::Length { .. })), "cut {cut}");
        }
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(load(&longer), Err(Error::Length { .. })));

        let mut act = bytes.clone();
        act[8 + 8] = 9;
        assert!(matches!(load(&reseal(act)), Err(Error::Version(_))));

        let mut ver = bytes.clone();
        ver[4] = 2;
        assert!(matches!(load(&reseal(ver)), Err(Error::Version(_))));

        let mut crc = bytes.clone();
        let n = crc.len();
        crc[n - 1] ^= 0xff;
        assert!(matches!(load(&crc), Err(Error::Corruption { .. })));
    }

    #[test]
    fn unchained_dims_rejected() {
        // two 1→1 layers where the second header claims 2→1
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"LWG1");
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        for (i, o) in [(1u32, 1u32), (2, 1)] {
            bytes.extend_from_slice(&i.to_le_bytes());
            bytes.extend_from_slice(&o.to_le_bytes());
            bytes.push(0);
        }
        bytes.extend(core::iter::repeat(0u8).take(4 * (2 + 3)));
        bytes.extend_from_slice(&[0; 4]);
        assert!(matches!(load(&reseal(bytes)), Err(Error::Format(_))));
    }

    #[test]
    fn zero_layers_or_dims_rejected() {
        let mut empty = Vec::from(*b"LWG1");
        empty.extend_from_slice(&[1, 0, 0, 0]);
        empty.extend_from_slice(&[0; 4]);
        assert!(matches!(load(&reseal(empty)), Err(Error::Format(_))));

        let mut zero = Vec::from(*b"LWG1");
        zero.extend_from_slice(&[1, 0, 1, 0]);
        zero.extend_from_slice(&0u32.to_le_bytes());
        zero.extend_from_slice(&1u32.to_le_bytes());
        zero.push(0);
        zero.extend_from_slice(&[0; 4 + 4]);
        assert!(matches!(load(&reseal(zero)), Err(Error::Format(_))));
    }

    #[test]
    fn huge_declared_dims_do_not_panic() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"LWG1");
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&u32::MAX.to_le_bytes());
        bytes.extend_from_slice(&u32::MAX.to_le_bytes());
        bytes.push(0);
        bytes.extend_from_slice(&[0; 4]);
        assert!(matches!(load(&bytes), Err(Error::Length { .. })));
    }

    proptest::proptest! {
        #[test]
        fn round_trip_random_ladders(
            seed in 0u64..1000,
            dims in proptest::collection::vec(1usize..12, 2..5),
            act in 0u8..5,
        ) {
            let a = Activation::from_code(act).unwrap();
            let net = Network::ladder(&dims, a, Activation::Tanh, &mut Rng::new(seed)).unwrap();
            let bytes = save(&net);
            proptest::prop_assert_eq!(bytes.len(), encoded_len(dims.windows(2).map(|w| (w[0], w[1]))));
            proptest::prop_assert_eq!(load(&bytes).unwrap(), net);
        }
    }
}

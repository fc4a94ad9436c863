use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;

use lerpgan_core::infer::InferenceSession;
use lerpgan_core::latent::LatentVector;
use lerpgan_core::modelfmt;
use lerpgan_core::nn::Network;
use lerpgan_core::{Matrix, Rng};

struct Counting;

thread_local! {
    static ALLOCS: Cell<usize> = const { Cell::new(0) };
}

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let _ = ALLOCS.try_with(|c| c.set(c.get() + 1));
        System.alloc(layout)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout)
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let _ = ALLOCS.try_with(|c| c.set(c.get() + 1));
        System.realloc(ptr, layout, new_size)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

fn allocations() -> usize {
    ALLOCS.with(Cell::get)
}

#[test]
fn generate_does_not_allocate() {
    let g = Network::default_generator(&mut Rng::new(1));
    let mut session = InferenceSession::new(&modelfmt::save(&g)).unwrap();
    let z = LatentVector::sample(&mut Rng::new(2), 100);
    session.generate_latent(&z).unwrap();
    let before = allocations();
    let mut checksum = 0.0f32;
    for _ in 0..50 {
        checksum += session.generate(z.as_slice()).unwrap()[0];
    }
    assert_eq!(allocations(), before);
    assert!(checksum.is_finite());
}

#[test]
fn session_matches_training_forward_on_100_latents() {
    let g = Network::default_generator(&mut Rng::new(3));
    let mut session = InferenceSession::new(&modelfmt::save(&g)).unwrap();
    let mut rng = Rng::new(4);
    for i in 0..100 {
        let z = Matrix::randn(&mut rng, 1, 100);
        let (want, _) = g.forward(&z).unwrap();
        let got = session.generate(z.as_slice()).unwrap();
        let same = got.iter().zip(want.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same, "latent {i}");
    }
}

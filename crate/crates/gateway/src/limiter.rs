use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

struct Bucket {
    tokens: f64,
    capacity: f64,
    per_sec: f64,
    last: Instant,
}

/// Caps requests in flight and, optionally, the request rate (token bucket
/// with a burst of `max_concurrent`).
pub struct Limiter {
    max_concurrent: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
    bucket: Option<Mutex<Bucket>>,
}

/// Holds one concurrency slot until dropped.
pub struct Permit<'a> {
    limiter: &'a Limiter,
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.limiter.in_flight.lock() -= 1;
        self.limiter.freed.notify_one();
    }
}

impl Limiter {
    pub fn new(max_concurrent: usize, requests_per_minute: Option<f64>) -> Limiter {
        let bucket = requests_per_minute.map(|rpm| {
            let capacity = max_concurrent.max(1) as f64;
            Mutex::new(Bucket { tokens: capacity, capacity, per_sec: rpm / 60.0, last: Instant::now() })
        });
        Limiter { max_concurrent: max_concurrent.max(1), in_flight: Mutex::new(0), freed: Condvar::new(), bucket }
    }

    /// Blocks until a token and a concurrency slot are both free.
    pub fn acquire(&self) -> Permit<'_> {
        if let Some(bucket) = &self.bucket {
            loop {
                let wait = {
                    let mut b = bucket.lock();
                    let now = Instant::now();
                    b.tokens = (b.tokens + now.duration_since(b.last).as_secs_f64() * b.per_sec).min(b.capacity);
                    b.last = now;
                    if b.tokens >= 1.0 {
                        b.tokens -= 1.0;
                        break;
                    }
                    Duration::from_secs_f64((1.0 - b.tokens) / b.per_sec)
                };
                std::thread::sleep(wait);
            }
        }
        let mut n = self.in_flight.lock();
        while *n >= self.max_concurrent {
            self.freed.wait(&mut n);
        }
        *n += 1;
        Permit { limiter: self }
    }

    pub fn in_flight(&self) -> usize {
        *self.in_flight.lock()
    }
}

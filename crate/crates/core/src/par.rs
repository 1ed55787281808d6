//! Data-parallel helpers. With the `parallel` feature these run on rayon's
//! global pool; without it they are plain sequential loops with the same
//! results and ordering.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether the crate was built with the rayon backend.
pub const PARALLEL: bool = cfg!(feature = "parallel");

/// Order-preserving map over a slice.
pub fn map<T, U, G>(items: &[T], g: G) -> Vec<U>
where
    T: Sync,
    U: Send,
    G: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(g).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(g).collect()
    }
}

/// Order-preserving map over `0..len`.
pub fn map_range<U, G>(len: usize, g: G) -> Vec<U>
where
    U: Send,
    G: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(g).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(g).collect()
    }
}

/// First index (lowest) whose item satisfies `pred`.
pub fn position<T, G>(items: &[T], pred: G) -> Option<usize>
where
    T: Sync,
    G: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().position_first(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().position(pred)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let v: Vec<u64> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(map_range(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
        assert_eq!(position(&v, |&x| x > 500 && x % 7 == 0), Some(504));
        assert_eq!(position(&v, |&x| x > 5000), None);
    }
}

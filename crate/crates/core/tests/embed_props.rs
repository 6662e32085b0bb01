use ontokg_core::embed::{cosine_similarity, top_k, Embedding, VectorIndex};
use proptest::prelude::*;

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / n).collect()
    }
}

/// Scores every entry as the dot product of unit vectors, then sorts the
/// whole list by score descending and id ascending.
fn oracle(entries: &[(String, Vec<f64>)], query: &[f64], k: usize) -> Vec<(String, f64)> {
    let q = unit(query);
    let mut all: Vec<(String, f64)> = entries
        .iter()
        .map(|(id, v)| {
            let score: f64 = unit(v).iter().zip(&q).map(|(a, b)| a * b).sum();
            (id.clone(), score.clamp(-1.0, 1.0))
        })
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![(-3i32..=3).prop_map(f64::from), -2.0f64..2.0],
        dim,
    )
}

proptest! {
    #[test]
    fn top_k_matches_full_sort(
        (dim, vectors, query) in (1usize..6).prop_flat_map(|d| (Just(d), prop::collection::vec(vector(d), 1..30), vector(d))),
        k in 1usize..40,
    ) {
        let entries: Vec<(String, Vec<f64>)> =
            vectors.into_iter().enumerate().map(|(i, v)| (format!("id{:03}", (i * 37) % 101), v)).collect();
        let mut index = VectorIndex::new(dim);
        for (id, v) in &entries {
            index.insert(id.clone(), "", Embedding::new(v.clone())).unwrap();
        }
        let got = top_k(&index, &Embedding::new(query.clone()), k).unwrap();
        let want = oracle(&entries, &query, k);
        let got: Vec<(String, f64, usize)> = got.into_iter().map(|s| (s.id, s.score, s.rank)).collect();
        let want: Vec<(String, f64, usize)> =
            want.into_iter().enumerate().map(|(i, (id, score))| (id, score, i + 1)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn cosine_is_symmetric_and_scale_invariant(
        (a, b) in (1usize..8).prop_flat_map(|d| (vector(d), vector(d))),
        alpha in 0.01f64..100.0,
    ) {
        let (ea, eb) = (Embedding::new(a.clone()), Embedding::new(b));
        match cosine_similarity(&ea, &eb) {
            Ok(c) => {
                prop_assert!((c - cosine_similarity(&eb, &ea).unwrap()).abs() < 1e-12);
                let scaled = Embedding::new(a.iter().map(|x| x * alpha).collect());
                prop_assert!((c - cosine_similarity(&scaled, &eb).unwrap()).abs() < 1e-9);
                prop_assert!((-1.0..=1.0).contains(&c));
            }
            Err(_) => prop_assert!(ea.norm() == 0.0 || eb.norm() == 0.0),
        }
    }
}

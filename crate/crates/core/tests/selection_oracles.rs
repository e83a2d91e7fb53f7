mod common;

use anomind::classify::NaiveBayes;
use anomind::select::{mrmr_rank, mutual_information};
use anomind::{BinaryMatrix, Exec};
use common::*;
use rand::Rng;

fn random_problem(seed: u64, rows: usize, cols: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut r = rng(seed);
    let labels: Vec<usize> = (0..rows).map(|_| r.random_range(0..4)).collect();
    let columns = (0..cols)
        .map(|_| {
            // Columns lean on the label by varying amounts.
            let bias: [f64; 4] = std::array::from_fn(|_| r.random_range(0.05..0.95));
            labels.iter().map(|&y| r.random_bool(bias[y]) as u8).collect()
        })
        .collect();
    (columns, labels)
}

#[test]
fn mrmr_trace_matches_brute_force() {
    for seed in 0..50 {
        let (columns, labels) = random_problem(seed, 200, 10);
        let brute = mrmr_brute(&columns, &labels, 10);
        for exec in [Exec::Sequential, Exec::Parallel] {
            let ours = mrmr_rank(&columns, &labels, 10, exec).unwrap().ordered_columns();
            assert_eq!(ours, brute, "seed {seed}");
        }
    }
}

#[test]
fn mrmr_ties_pick_lowest_index() {
    let (mut columns, labels) = random_problem(99, 200, 4);
    let copy = columns[2].clone();
    columns.insert(0, copy.clone());
    columns.push(copy);
    let order = mrmr_rank(&columns, &labels, columns.len(), Exec::Sequential).unwrap().ordered_columns();
    assert_eq!(order, mrmr_brute(&columns, &labels, columns.len()));
    let pos = |c: usize| order.iter().position(|&x| x == c).unwrap();
    assert!(pos(0) < pos(3) && pos(3) < pos(5));
}

#[test]
fn mutual_information_matches_entropy_form() {
    let mut r = rng(31);
    for _ in 0..500 {
        let n = r.random_range(1..300);
        let kx = r.random_range(1..5);
        let ky = r.random_range(1..5);
        let x: Vec<usize> = (0..n).map(|_| r.random_range(0..kx)).collect();
        let y: Vec<usize> = (0..n).map(|_| r.random_range(0..ky)).collect();
        let mi = mutual_information(&x, &y).unwrap();
        assert!((mi - mi_entropy(&x, &y)).abs() < 1e-12);
        assert!(mi >= 0.0);
    }
}

#[test]
fn naive_bayes_matches_counting_oracle() {
    for seed in 0..20 {
        let (columns, labels) = random_problem(500 + seed, 120, 8);
        let rows: Vec<Vec<u8>> = (0..labels.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let x = BinaryMatrix::from_rows(rows.clone(), 8).unwrap();
        let model = NaiveBayes::fit(&x, &labels, 4).unwrap();

        for c in 0..4 {
            let members: Vec<&Vec<u8>> = rows.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
            assert_eq!(model.class_counts[c], members.len());
            for j in 0..8 {
                let ones = members.iter().filter(|r| r[j] == 1).count();
                assert_eq!(model.one_counts[c][j], ones);
            }
        }

        let mut r = rng(seed);
        for _ in 0..50 {
            let row: Vec<u8> = (0..8).map(|_| r.random_range(0..2)).collect();
            let post = nb_posterior_brute(&rows, &labels, 4, &row);
            let (pred, scores) = model.predict(&row).unwrap();
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
            for c in 0..4 {
                assert!(((scores[c] - max).exp() / z - post[c]).abs() < 1e-9);
            }
            let best = post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(post[pred] >= best - 1e-12);
        }
    }
}

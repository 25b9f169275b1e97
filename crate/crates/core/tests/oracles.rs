mod common;

use common::{random_graph, random_matrix, rng};
use grafhub::baselines::centrality::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality,
};
use grafhub::baselines::{isolation_forest_scores, lof_scores};
use grafhub::community::{louvain_with_restarts, modularity};
use grafhub::eval::metrics::{auc_roc, global_efficiency, sed_profile, spearman};
use grafhub::grafhub::assemble_y;
use grafhub::spectral::compute_shifted_signals;
use grafhub::{normalized_laplacian, Graph, GrafhubProblem, SignalMatrix, SpectralDecomposition};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn expect_ok(name: &str, check: common::Check) {
    match check {
        Ok(msg) => println!("{name}: {msg}"),
        Err(msg) => panic!("{name}: {msg}"),
    }
}

#[test]
fn prox_matches_grid_search() {
    expect_ok("prox", common::prox_vs_grid());
}

#[test]
fn spectral_filter_matches_polynomial() {
    expect_ok("filter", common::filter_paths_agree());
}

#[test]
fn h_step_is_stationary() {
    expect_ok("h-step", common::h_step_stationary());
}

#[test]
fn auc_matches_pair_counting() {
    expect_ok("auc", common::auc_matches_pair_count());
}

#[test]
fn total_variation_trace_matches_edges() {
    expect_ok("tv", common::tv_trace_vs_edgewise());
}

#[test]
fn complete_graph_has_unit_efficiency() {
    expect_ok("ge", common::complete_graph_efficiency());
}

#[test]
fn participation_hand_cases() {
    expect_ok("participation", common::participation_hand_cases());
}

#[test]
fn normal_matrix_matches_naive_sums() {
    let mut r = rng(21);
    for case in 0..8 {
        let n = 10 + 4 * case;
        let g = random_graph(&mut r, n, 0.25);
        let l = normalized_laplacian(&g);
        let decomp = SpectralDecomposition::of_graph(&g).unwrap();
        let f = random_matrix(&mut r, n, 3);
        let order = 2 + case % 5;
        let rho = 0.7 + case as f64;

        // Lᵗ F by repeated multiplication, then every entry summed by hand.
        let mut powers = vec![f.clone()];
        for t in 1..order {
            powers.push(&l * &powers[t - 1]);
        }
        let mut naive = DMatrix::zeros(order, order);
        for s in 0..order {
            let ls = &l * &powers[s];
            for t in 0..order {
                let mut acc = 0.0;
                for i in 0..n {
                    for p in 0..f.ncols() {
                        acc += 2.0 * ls[(i, p)] * powers[t][(i, p)] + rho * powers[s][(i, p)] * powers[t][(i, p)];
                    }
                }
                naive[(s, t)] = acc;
            }
        }
        let shifted = compute_shifted_signals(&decomp, &f, order).unwrap();
        let assembled = assemble_y(&shifted, &l, rho).unwrap();
        let moments = GrafhubProblem::new(&decomp, &f, order).unwrap().normal_matrix(order, rho);
        for m in [&assembled, &moments] {
            let rel = (m - &naive).norm() / naive.norm();
            assert!(rel < 1e-9, "case {case}: relative gap {rel:e}");
        }
    }
}

fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n_nodes();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        for &(j, w) in g.neighbors(i) {
            d[i][j] = 1.0 / w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

#[test]
fn closeness_matches_floyd_warshall() {
    let mut r = rng(22);
    for case in 0..20 {
        let n = r.random_range(4..25);
        let mut g = random_graph(&mut r, n, 0.2);
        if case % 4 == 0 {
            // Cut one node loose to exercise the disconnected formula.
            let keep: Vec<_> = g.edges().into_iter().filter(|&(i, j, _)| i != 0 && j != 0).collect();
            g = Graph::from_edges(n, &keep).unwrap();
        }
        let d = floyd_warshall(&g);
        let got = closeness_centrality(&g).scores;
        for i in 0..n {
            let finite: Vec<f64> = (0..n).filter(|&j| j != i && d[i][j].is_finite()).map(|j| d[i][j]).collect();
            let want = if finite.is_empty() {
                0.0
            } else {
                let reach = finite.len() as f64;
                let total: f64 = finite.iter().sum();
                reach / total * reach / (n - 1) as f64
            };
            assert!((got[i] - want).abs() <= 1e-12 * want.max(1.0), "node {i}: {} vs {want}", got[i]);
        }
    }
}

/// Sum over unordered pairs of the fraction of shortest paths through each
/// node, with path counts built from the distance matrix.
fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.n_nodes();
    let d = floyd_warshall(g);
    let on_path = |a: f64, b: f64, c: f64| c.is_finite() && (a + b - c).abs() <= 1e-12 * c.max(1.0);
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&v| d[s][v].is_finite()).collect();
        order.sort_by(|&a, &b| d[s][a].total_cmp(&d[s][b]));
        sigma[s][s] = 1.0;
        for &v in order.iter().skip(1) {
            sigma[s][v] = g
                .neighbors(v)
                .iter()
                .filter(|&&(u, w)| on_path(d[s][u], 1.0 / w, d[s][v]))
                .map(|&(u, _)| sigma[s][u])
                .sum();
        }
    }
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            if !d[s][t].is_finite() {
                continue;
            }
            for v in 0..n {
                if v != s && v != t && on_path(d[s][v], d[v][t], d[s][t]) {
                    bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    bc
}

#[test]
fn betweenness_matches_path_counting() {
    let mut r = rng(23);
    for _ in 0..20 {
        let n = r.random_range(4..20);
        // Weights 1 and 2 give path lengths on a half-integer lattice, so
        // equal-length paths tie exactly.
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if r.random::<f64>() < 0.3 {
                    edges.push((i, j, if r.random::<bool>() { 1.0 } else { 2.0 }));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let got = betweenness_centrality(&g).scores;
        let want = brute_betweenness(&g);
        for v in 0..n {
            assert!((got[v] - want[v]).abs() < 1e-9, "node {v}: {} vs {}", got[v], want[v]);
        }
    }
}

/// 12-node weighted graph with reference values from networkx 3
/// (closeness with `distance = 1/w`, unnormalized weighted betweenness,
/// `eigenvector_centrality_numpy`).
fn reference_graph() -> Graph {
    let edges = [
        (0, 1, 2.063), (0, 6, 2.743), (0, 7, 2.439), (0, 9, 1.063), (0, 10, 1.25), (1, 6, 2.684),
        (2, 3, 0.513), (2, 6, 2.553), (2, 7, 2.493), (3, 11, 1.67), (4, 5, 1.258), (4, 6, 1.196),
        (4, 10, 1.137), (6, 11, 1.613), (8, 10, 1.761), (9, 11, 1.884), (10, 11, 2.989),
    ];
    Graph::from_edges(12, &edges).unwrap()
}

#[test]
fn centralities_match_networkx() {
    let g = reference_graph();
    let closeness = [
        1.0102595070064193, 0.8543491065425459, 0.8468860260393325, 0.663415532750418,
        0.7869742139325607, 0.5016712057155982, 1.1182337306968617, 0.7733848108930406,
        0.6654920393536847, 0.7506650978613134, 1.0137752116436927, 1.0384376818812668,
    ];
    let betweenness = [12.0, 0.0, 0.0, 0.0, 10.0, 0.0, 21.0, 0.0, 0.0, 0.0, 16.0, 20.0];
    let eigenvector = [
        0.4781085606747021, 0.34636427064859354, 0.3004285884977559, 0.09358849370479562,
        0.13689437037737653, 0.024854231199574896, 0.5266744741860405, 0.27638848662675297,
        0.06423352286822329, 0.15383695471634248, 0.2527366829492983, 0.29601667104026747,
    ];
    let c = closeness_centrality(&g).scores;
    let b = betweenness_centrality(&g).scores;
    let e = eigenvector_centrality(&g, 0).unwrap().scores;
    for i in 0..12 {
        assert!((c[i] - closeness[i]).abs() < 1e-12, "closeness {i}");
        assert!((b[i] - betweenness[i]).abs() < 1e-12, "betweenness {i}");
        assert!((e[i] - eigenvector[i]).abs() < 1e-7, "eigenvector {i}: {} vs {}", e[i], eigenvector[i]);
    }
    let degree = degree_centrality(&g).scores;
    assert!((degree[6] - (2.743 + 2.684 + 2.553 + 1.196 + 1.613)).abs() < 1e-12);
}

#[test]
fn modularity_matches_pairwise_formula() {
    let mut r = rng(24);
    for _ in 0..20 {
        let n = r.random_range(4..30);
        let g = random_graph(&mut r, n, 0.2);
        let labels: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
        let k = g.degrees();
        let m2: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += g.weight(i, j) - k[i] * k[j] / m2;
                }
            }
        }
        q /= m2;
        assert!((modularity(&g, &labels) - q).abs() < 1e-12);
    }
}

#[test]
fn louvain_finds_best_split_of_two_cliques() {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    edges.push((4, 5, 1.0));
    let g = Graph::from_edges(10, &edges).unwrap();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << 9) {
        let labels: Vec<usize> = (0..10).map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize }).collect();
        best = best.max(modularity(&g, &labels));
    }
    let found = louvain_with_restarts(&g, 3, 5);
    let q = modularity(&g, &found);
    assert!((q - best).abs() < 1e-12, "louvain {q} vs exhaustive {best}");
    assert!((0..5).all(|i| found[i] == found[0]) && (5..10).all(|i| found[i] == found[5]));
    assert_ne!(found[0], found[5]);
}

fn lof_fixture() -> SignalMatrix {
    let rows: [[f64; 3]; 25] = [
        [-0.45761576104021817, -1.901222739800844, -1.289537739784976],
        [-1.8417350377917323, -0.23509113107468127, -1.2674464814437032],
        [0.2712643588217015, 0.15675108662422516, -0.18693094462995438],
        [3.483240289179487, 5.461307104153363, 5.951499054598928],
        [0.11330898600330756, -1.5301357655053935, -0.47775327603393064],
        [-0.9785190780566395, -0.8088372394255993, 1.0608986233860787],
        [-0.8075346753318965, -0.0325217049455206, 0.8843898673831739],
        [-0.583600432743302, -0.11170194958415963, 0.11046414324948059],
        [0.06378177425506196, -1.2250558264176934, 0.0761402303770081],
        [1.3588234217415376, -1.5471446781284823, 0.8593826880215982],
        [-3.8806459743034187, -4.6414703941072215, -1.9995834536575772],
        [0.7622597120847118, -1.1992889021052233, 0.07451622877146342],
        [0.5766895836701853, -0.1887821253507493, 0.682910267195206],
        [-0.06651732014941557, 0.6672475608343279, 1.438522591656152],
        [-0.6756622510056528, 0.20313861038960904, -0.46330757653841514],
        [0.12726841122583082, -1.18719452785014, -0.5793015965026732],
        [-0.1961959728044967, 0.8987638721004078, 1.145222007454132],
        [-1.323527792484255, -0.7946423659870495, 0.6469034225734218],
        [-1.9924197841744944, -0.46316986495236695, -0.09728692567008902],
        [1.2570149772868198, 0.6894039005707556, -0.32721342022219785],
        [-0.3685758940999591, -0.25019540051792494, 1.5235294004561601],
        [-0.4280249425728672, -0.3036803883647294, 0.35258906728526535],
        [-0.12077044508645512, -0.19728422796572256, -1.1140671431510563],
        [-0.011521468038548173, -0.4435812229744192, 1.1661277761902227],
        [0.6530885027011638, -0.024143613009932233, 0.6683810232673438],
    ];
    SignalMatrix::from_fn(25, 3, |i, j| rows[i][j])
}

#[test]
fn lof_matches_scikit_learn() {
    // `-negative_outlier_factor_` from sklearn's LocalOutlierFactor(n_neighbors=5).
    let want = [
        1.174580139953624, 1.4092840021656778, 1.0730042191418894, 6.4682100666976226,
        1.023960372583828, 0.9734542754199687, 0.9769822396024412, 0.9608965142519155,
        0.9817111345222059, 1.3223824127245565, 3.404443721984657, 1.0360692950910777,
        0.9351906967962528, 1.0897048109332548, 1.0586126760235472, 1.0809603837357842,
        1.1381572554174708, 1.009752483253926, 1.2830963128977024, 1.298210710037214,
        0.970053971551784, 0.9557355222200725, 1.0173457174492846, 1.0292544717558716,
        0.9772230480866945,
    ];
    let got = lof_scores(&lof_fixture(), 5).unwrap().scores;
    for i in 0..25 {
        assert!((got[i] - want[i]).abs() < 1e-9, "row {i}: {} vs {}", got[i], want[i]);
    }
}

#[test]
fn isolation_forest_properties() {
    let x = lof_fixture();
    let a = isolation_forest_scores(&x, 100, 5).unwrap().scores;
    let b = isolation_forest_scores(&x, 100, 5).unwrap().scores;
    let c = isolation_forest_scores(&x, 100, 6).unwrap().scores;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|&s| s > 0.0 && s < 1.0));
    // The two planted outliers score highest.
    let mut order: Vec<usize> = (0..25).collect();
    order.sort_by(|&i, &j| a[j].total_cmp(&a[i]));
    let top: Vec<usize> = order[..2].to_vec();
    assert!(top.contains(&3) && top.contains(&10), "top two {top:?}");
}

fn labels_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-5i32..5, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_ignores_monotone_transforms((scores, mut labels) in labels_strategy()) {
        labels[0] = true;
        labels[1] = false;
        let base = auc_roc(&scores, &labels).unwrap();
        let warped: Vec<f64> = scores.iter().map(|s| (0.3 * s).exp() * 7.0 - 2.0).collect();
        prop_assert_eq!(base, auc_roc(&warped, &labels).unwrap());
    }

    #[test]
    fn auc_of_negated_scores_complements((scores, mut labels) in labels_strategy()) {
        labels[0] = true;
        labels[1] = false;
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        prop_assert_eq!(auc_roc(&scores, &labels).unwrap() + auc_roc(&neg, &labels).unwrap(), 1.0);
    }

    #[test]
    fn sed_sums_to_one(seed in 0u64..1000, n in 3usize..25, p in 1usize..5) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let decomp = SpectralDecomposition::of_graph(&g).unwrap();
        let f = random_matrix(&mut r, n, p);
        let sed = sed_profile(&decomp, &f).unwrap();
        prop_assert!((sed.sed.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn efficiency_bounded_and_monotone(seed in 0u64..1000, n in 2usize..15) {
        let mut r = rng(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if r.random::<f64>() < 0.3 {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let ge = global_efficiency(&g).unwrap();
        prop_assert!((0.0..=1.0).contains(&ge));
        let (a, b) = (r.random_range(0..n), r.random_range(0..n));
        if a != b && g.weight(a, b) == 0.0 {
            edges.push((a.min(b), a.max(b), 1.0));
            let bigger = global_efficiency(&Graph::from_edges(n, &edges).unwrap()).unwrap();
            prop_assert!(bigger >= ge);
        }
    }

    #[test]
    fn spearman_is_symmetric_and_bounded(x in prop::collection::vec(-10.0f64..10.0, 3..30), seed in 0u64..100) {
        let mut r = rng(seed);
        let y: Vec<f64> = x.iter().map(|v| v + r.random_range(-5.0..5.0)).collect();
        let a = spearman(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert_eq!(a, spearman(&y, &x).unwrap());
    }
}

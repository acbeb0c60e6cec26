//! Stage-by-stage timings over one fixed medium-sized source file, plus the
//! network passes at the production model size.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use loglevel_core::extract::{extract_from_source, ExtractOptions, ExtractionStats};
use loglevel_core::graph::{induced_subgraph, k_hop_nodes};
use loglevel_core::java;
use loglevel_core::model::{backward, encode_sample, forward, predict};
use loglevel_core::{LabeledSample, ModelConfig, ModelParams, Vocabulary};

/// Nine methods, four log sites, guards, loops, and enough locals that the
/// dataflow pass has real work to do.
const SOURCE: &str = r#"
class StreamBalancer {
    private static Logger LOG;
    int inFlight;
    int dropped;

    int admit(int budget, int size) {
        int room = budget - inFlight;
        if (room < size) {
            LOG.warn("over budget by {}", size - room);
            dropped = dropped + 1;
            return 0;
        }
        inFlight = inFlight + size;
        return size;
    }

    void drain(int rounds) {
        int done = 0;
        while (done < rounds) {
            int step = pump(done);
            done = done + step;
            if (LOG.isDebugEnabled()) {
                LOG.debug("drained {} of {}", done, rounds);
            }
        }
    }

    int pump(int cursor) {
        int moved = 0;
        for (int i = 0; i < cursor; i = i + 1) {
            moved = moved + credit(i, cursor);
        }
        return moved;
    }

    int credit(int lane, int cap) {
        int share = cap - lane;
        if (share < 0) {
            share = 0;
        }
        return share;
    }

    void reset(int floor) {
        inFlight = floor;
        dropped = 0;
        LOG.info("reset to {}", floor);
    }

    void guard(int level) {
        if (level > 9) {
            LOG.error("level {} exceeds hard cap", level);
            throw new BalanceException("cap");
        }
    }

    int pressure() {
        int load = inFlight + dropped;
        return load;
    }

    void tick(int now) {
        int p = pressure();
        if (p > 100) {
            reset(0);
        }
        seen = now;
    }

    int seen;
}
"#;

fn medium_sample() -> LabeledSample {
    let mut stats = ExtractionStats::default();
    let samples = extract_from_source(
        "StreamBalancer.java",
        "bench",
        SOURCE,
        ExtractOptions::default(),
        &mut stats,
    )
    .expect("bench source extracts");
    assert_eq!(samples.len(), 4, "bench source should hold four log sites");
    samples.into_iter().next().unwrap()
}

fn frontend(c: &mut Criterion) {
    c.bench_function("tokenize", |b| b.iter(|| java::tokenize(black_box(SOURCE)).unwrap()));
    c.bench_function("parse", |b| b.iter(|| java::parse_source(black_box(SOURCE)).unwrap()));
    c.bench_function("graph_build", |b| {
        b.iter(|| java::file_to_graph("StreamBalancer.java", "bench", black_box(SOURCE)).unwrap())
    });
}

fn extraction(c: &mut Criterion) {
    c.bench_function("extract_samples", |b| {
        b.iter(|| {
            let mut stats = ExtractionStats::default();
            extract_from_source(
                "StreamBalancer.java",
                "bench",
                black_box(SOURCE),
                ExtractOptions::default(),
                &mut stats,
            )
            .unwrap()
        })
    });

    let graph = java::file_to_graph("StreamBalancer.java", "bench", SOURCE).unwrap().graph;
    let center = (graph.node_count() / 2) as u32;
    c.bench_function("hop_window_cut", |b| {
        b.iter(|| {
            let keep = k_hop_nodes(black_box(&graph), center, 0, 4).unwrap();
            induced_subgraph(&graph, &keep).unwrap()
        })
    });
}

fn network(c: &mut Criterion) {
    let sample = medium_sample();
    let vocab = Vocabulary::build(sample.graph.nodes.iter().map(|n| n.text.as_str()), 1);
    let config = ModelConfig::default();
    let params = ModelParams::init(config, vocab.len(), vocab.content_hash().unwrap(), 17);
    let enc = encode_sample(&sample, &vocab).unwrap();

    c.bench_function("encode", |b| b.iter(|| encode_sample(black_box(&sample), &vocab).unwrap()));
    c.bench_function("forward", |b| b.iter(|| predict(&params, black_box(&enc)).unwrap()));
    c.bench_function("forward_backward", |b| {
        b.iter(|| {
            let fwd = forward(&params, black_box(&enc)).unwrap();
            let mut grads = params.zeros_like();
            backward(&params, &enc, &fwd, &mut grads).unwrap();
            grads
        })
    });
}

criterion_group!(benches, frontend, extraction, network);
criterion_main!(benches);

//! A second, deliberately naive retrograde analysis over the positions
//! reachable from the start, built only from forward move generation. The
//! solver must agree with it on every state it visits.

use std::collections::{HashMap, VecDeque};

use abalone_core::rules::{apply_move, is_terminal, legal_moves};
use abalone_core::solver::Outcome;
use abalone_core::{solve, Color, Constellation, GameConfig, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Win,
    Loss,
    Draw,
}

struct Graph {
    nodes: Vec<(Constellation, Color)>,
    succ: Vec<Vec<u32>>,
    wins_at_once: Vec<bool>,
}

fn reachable(config: &GameConfig) -> Graph {
    let start = (config.initial(), Color::Black);
    let mut ids = HashMap::from([(start, 0u32)]);
    let mut graph = Graph {
        nodes: vec![start],
        succ: Vec::new(),
        wins_at_once: Vec::new(),
    };
    let mut i = 0;
    while i < graph.nodes.len() {
        let (c, mover) = graph.nodes[i];
        let mut out = Vec::new();
        let mut at_once = false;
        for mv in legal_moves(&c, mover, config) {
            let next = config.normalize(apply_move(config.board(), &c, &mv));
            if is_terminal(&next, config).is_some() {
                at_once = true;
                continue;
            }
            let key = (next, mover.other());
            let id = *ids.entry(key).or_insert_with(|| {
                graph.nodes.push(key);
                (graph.nodes.len() - 1) as u32
            });
            out.push(id);
        }
        out.sort_unstable();
        out.dedup();
        graph.succ.push(out);
        graph.wins_at_once.push(at_once);
        i += 1;
    }
    graph
}

fn retrograde(graph: &Graph, stalemate_loses: bool) -> Vec<Value> {
    let n = graph.nodes.len();
    let mut pred = vec![Vec::new(); n];
    for (a, out) in graph.succ.iter().enumerate() {
        for &b in out {
            pred[b as usize].push(a);
        }
    }
    let mut value = vec![Value::Draw; n];
    let mut left: Vec<usize> = graph.succ.iter().map(Vec::len).collect();
    let mut queue = VecDeque::new();
    for (a, v) in value.iter_mut().enumerate() {
        if graph.wins_at_once[a] {
            *v = Value::Win;
            queue.push_back(a);
        } else if graph.succ[a].is_empty() && stalemate_loses {
            *v = Value::Loss;
            queue.push_back(a);
        }
    }
    while let Some(b) = queue.pop_front() {
        for &a in &pred[b] {
            if value[a] != Value::Draw {
                continue;
            }
            if value[b] == Value::Loss {
                value[a] = Value::Win;
                queue.push_back(a);
            } else {
                left[a] -= 1;
                if left[a] == 0 {
                    value[a] = Value::Loss;
                    queue.push_back(a);
                }
            }
        }
    }
    value
}

fn as_outcome(v: Value, mover: Color) -> Outcome {
    match v {
        Value::Draw => Outcome::Draw,
        Value::Win => Outcome::win_for(mover),
        Value::Loss => Outcome::win_for(mover.other()),
    }
}

fn agree(shape: &str) -> Graph {
    let config = GameConfig::preset(shape.parse().unwrap()).unwrap();
    let db = solve(&config, &SolveOptions::default()).unwrap();
    let graph = reachable(&config);
    let naive = retrograde(&graph, true);
    for (k, &(c, mover)) in graph.nodes.iter().enumerate() {
        let got = db.value(&c, mover).unwrap().outcome;
        assert_eq!(
            got,
            as_outcome(naive[k], mover),
            "{} with {mover} to move",
            c.notation(config.board())
        );
    }
    graph
}

#[test]
fn agrees_on_2_2_2() {
    let graph = agree("2,2,2");
    assert_eq!(graph.nodes.len(), 420);
}

#[test]
fn agrees_on_2_2_3() {
    agree("2,2,3");
}

#[test]
fn stalemate_rule_only_moves_the_stalemates_in_2_2_3() {
    let config = GameConfig::preset("2,2,3".parse().unwrap()).unwrap();
    let graph = reachable(&config);
    let loses = retrograde(&graph, true);
    let draws = retrograde(&graph, false);
    let stalemated = graph
        .succ
        .iter()
        .zip(&graph.wins_at_once)
        .filter(|(s, w)| s.is_empty() && !**w)
        .count();
    let changed = loses.iter().zip(&draws).filter(|(a, b)| a != b).count();
    assert_eq!(stalemated, 4);
    assert_eq!(changed, stalemated);
    assert_eq!((loses[0], draws[0]), (Value::Draw, Value::Draw));
}

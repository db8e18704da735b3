//! Property tests for the BDD engine and the shifted-addition builders.

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sadd_bdd::bdd::{BinOp, Manager, NodeRef, VarId, VarOrder};
use sadd_bdd::sadd::{self, build_sadd, build_shifter, SaddInput, SaddParams};

const VARS: u32 = 4;

/// Small formula over `a0..a3`.
#[derive(Clone, Debug)]
enum Formula {
    Const(bool),
    Var(u32),
    Not(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Formula {
    fn eval(&self, bits: u32) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(i) => bits >> i & 1 == 1,
            Formula::Not(f) => !f.eval(bits),
            Formula::Bin(op, f, g) => op.eval(f.eval(bits), g.eval(bits)),
            Formula::Ite(c, t, e) => {
                if c.eval(bits) {
                    t.eval(bits)
                } else {
                    e.eval(bits)
                }
            }
        }
    }

    fn build(&self, mgr: &mut Manager) -> NodeRef {
        match self {
            Formula::Const(b) => mgr.constant(*b),
            Formula::Var(i) => mgr.var(VarId::a(*i)).unwrap(),
            Formula::Not(f) => {
                let f = f.build(mgr);
                mgr.not(f).unwrap()
            }
            Formula::Bin(op, f, g) => {
                let (f, g) = (f.build(mgr), g.build(mgr));
                mgr.apply(*op, f, g).unwrap()
            }
            Formula::Ite(c, t, e) => {
                let (c, t, e) = (c.build(mgr), t.build(mgr), e.build(mgr));
                mgr.ite(c, t, e).unwrap()
            }
        }
    }

    /// Same function, different operator sequence: push negations into
    /// De Morgan duals and expand ITE into AND/OR.
    fn rewrite(&self) -> Formula {
        use Formula::*;
        match self {
            Const(b) => Const(*b),
            Var(i) => Bin(BinOp::Xor, Box::new(Var(*i)), Box::new(Const(false))),
            Not(f) => Bin(BinOp::Nand, Box::new(f.rewrite()), Box::new(Const(true))),
            Bin(BinOp::And, f, g) => Not(Box::new(Bin(
                BinOp::Or,
                Box::new(Not(Box::new(g.rewrite()))),
                Box::new(Not(Box::new(f.rewrite()))),
            ))),
            Bin(op, f, g) => Bin(*op, Box::new(f.rewrite()), Box::new(g.rewrite())),
            Ite(c, t, e) => Bin(
                BinOp::Or,
                Box::new(Bin(
                    BinOp::And,
                    Box::new(c.rewrite()),
                    Box::new(t.rewrite()),
                )),
                Box::new(Bin(
                    BinOp::And,
                    Box::new(Not(Box::new(c.rewrite()))),
                    Box::new(e.rewrite()),
                )),
            ),
        }
    }
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::Const),
        (0..VARS).prop_map(Formula::Var),
    ];
    let ops = prop_oneof![
        Just(BinOp::And),
        Just(BinOp::Or),
        Just(BinOp::Xor),
        Just(BinOp::Nand),
        Just(BinOp::Nor),
        Just(BinOp::Xnor),
        Just(BinOp::Implies),
    ];
    leaf.prop_recursive(5, 48, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, f, g)| Formula::Bin(
                op,
                Box::new(f),
                Box::new(g)
            )),
            (inner.clone(), inner.clone(), inner).prop_map(|(c, t, e)| Formula::Ite(
                Box::new(c),
                Box::new(t),
                Box::new(e)
            )),
        ]
    })
}

fn order_strategy() -> impl Strategy<Value = Vec<VarId>> {
    Just((0..VARS).map(VarId::a).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn eval_agrees_with_truth_table(f in formula(), order in order_strategy()) {
        let mut mgr = Manager::new(VarOrder::new(order).unwrap());
        let root = f.build(&mut mgr);
        for bits in 0..1u32 << VARS {
            let got = mgr.eval_with(root, |v| Some(bits >> v.index & 1 == 1)).unwrap();
            prop_assert_eq!(got, f.eval(bits));
        }
    }

    #[test]
    fn equivalent_formulas_share_a_node(f in formula(), order in order_strategy()) {
        let mut mgr = Manager::new(VarOrder::new(order).unwrap());
        let direct = f.build(&mut mgr);
        let rewritten = f.rewrite().build(&mut mgr);
        prop_assert_eq!(direct, rewritten);
    }

    #[test]
    fn store_is_reduced_and_unique(fs in prop::collection::vec(formula(), 1..6)) {
        let mut mgr = Manager::new(VarOrder::new((0..VARS).map(VarId::a).collect()).unwrap());
        let roots: Vec<NodeRef> = fs.iter().map(|f| f.build(&mut mgr)).collect();
        let mut seen = HashSet::new();
        for node in mgr.iter_nodes() {
            prop_assert_ne!(node.low, node.high);
            prop_assert!(seen.insert(node));
        }
        // children sit strictly below their parent
        for &r in &roots {
            let mut stack = vec![r];
            while let Some(f) = stack.pop() {
                if let Some(node) = mgr.node(f).unwrap() {
                    for child in [mgr.low(f).unwrap(), mgr.high(f).unwrap()] {
                        prop_assert!(mgr.level(child).unwrap() > node.level);
                        stack.push(child);
                    }
                }
            }
        }
        let widths = mgr.level_widths(&roots).unwrap();
        prop_assert_eq!(mgr.dag_size(&roots).unwrap(), widths.values().sum::<usize>());
    }
}

#[test]
fn shifted_adder_matches_oracle_for_n_up_to_5() {
    for n in 1..=5 {
        let params = SaddParams::minimal(n).unwrap();
        let mut mgr = Manager::new(params.canonical_order());
        let f = build_sadd(&mut mgr, &params).unwrap();
        for a in 0..1u64 << n {
            for b in 0..1u64 << n {
                for d in 0..1u64 << params.d_width() {
                    let expected = sadd::oracle_sadd(&params, a, b, d).unwrap();
                    let x = params.input(a, b, d).unwrap();
                    assert_eq!(f.eval_value(&mgr, x).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn semantics_do_not_depend_on_order() {
    let params = SaddParams::minimal(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let reference: Vec<u64> = all_inputs(&params).map(sadd::sadd_value).collect();
    let mut sizes = HashSet::new();
    for _ in 0..20 {
        let mut mgr = Manager::new(params.random_order(&mut rng));
        let f = build_sadd(&mut mgr, &params).unwrap();
        let values: Vec<u64> = all_inputs(&params)
            .map(|x| f.eval_value(&mgr, x).unwrap())
            .collect();
        assert_eq!(values, reference);
        sizes.insert(mgr.dag_size(f.bits()).unwrap());
    }
    assert!(
        sizes.len() > 1,
        "random orders should not all give one size"
    );
}

#[test]
fn large_shifts_clear_the_shifter() {
    for n in 1..=5 {
        let params = SaddParams::minimal(n).unwrap();
        let mut mgr = Manager::new(params.canonical_order());
        let s = build_shifter(&mut mgr, &params).unwrap();
        for d in n as u64..1 << params.d_width() {
            for b in 0..1u64 << n {
                assert_eq!(
                    s.eval_value(&mgr, params.input(0, b, d).unwrap()).unwrap(),
                    0
                );
            }
        }
    }
}

#[test]
fn wider_shift_register_keeps_semantics() {
    let params = SaddParams::new(4, 5).unwrap();
    let mut mgr = Manager::new(params.canonical_order());
    let f = build_sadd(&mut mgr, &params).unwrap();
    for x in all_inputs(&params) {
        assert_eq!(f.eval_value(&mgr, x).unwrap(), sadd::sadd_value(x));
    }
}

fn all_inputs(params: &SaddParams) -> impl Iterator<Item = SaddInput> + '_ {
    let n = params.n();
    (0..1u64 << n).flat_map(move |a| {
        (0..1u64 << n).flat_map(move |b| {
            (0..1u64 << params.d_width()).map(move |d| params.input(a, b, d).unwrap())
        })
    })
}

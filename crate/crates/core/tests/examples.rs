//! Worked examples with hand-computed expected values.

use abtree::{
    build_from_sorted, bulk_update, erase_sorted, join_many_seq, select_double_binary,
    select_uniform, union_sorted, ABTree, Params, PreparedTree, Strategy, TreeLayout, UpdateBatch,
    UpdateKind, WorkCounters, Workers,
};

#[test]
fn uniform_separators_for_eight_ops() {
    let b = UpdateBatch::inserts(&[1u32, 2, 3, 4, 5, 6, 7, 8]).unwrap();
    assert_eq!(select_uniform(&b, 4).separators, vec![2, 4, 6]);
    assert_eq!(select_uniform(&b, 3).separators, vec![3, 6]);
}

#[test]
fn double_binary_quantiles() {
    let b = UpdateBatch::inserts(&[10u32, 20, 30, 40]).unwrap();
    let t = ABTree::from_sorted(Params::default(), &(1..=8).collect::<Vec<u32>>()).unwrap();
    let part = select_double_binary(&b, &t, 2).unwrap();
    assert_eq!(part.separators, vec![4, 20]);
    assert_eq!(part.pieces[1].lower, Some(4));
    assert_eq!(part.pieces[1].upper, Some(20));
    assert_eq!(part.pieces[1].batch, 0..2);
}

#[test]
fn single_worker_bulk_equals_finger_ops() {
    let c = WorkCounters::new();
    let evens: Vec<u32> = (1..=20_000).map(|i| 2 * i).collect();
    let ins: Vec<u32> = (1..=50).map(|i| 2 * i - 1).collect();
    let del: Vec<u32> = (1..=50).map(|i| 2 * i).collect();
    let mut ops: Vec<_> = ins.iter().map(|&k| (k, UpdateKind::Insert)).collect();
    ops.extend(del.iter().map(|&k| (k, UpdateKind::Delete)));
    let batch = UpdateBatch::from_unsorted(ops);

    let mut seq = ABTree::from_sorted(Params::default(), &evens).unwrap();
    union_sorted(&mut seq, &ins, &c).unwrap();
    erase_sorted(&mut seq, &del, &c).unwrap();
    let t = ABTree::from_sorted(Params::default(), &evens).unwrap();
    let bulk = bulk_update(t, &batch, &Workers::sequential(), Strategy::Uniform, &c).unwrap();
    assert_eq!(bulk.to_vec(), seq.to_vec());
    assert_eq!(bulk.len(), 20_000);
    assert_eq!(bulk.min(), Some(1));
}

#[test]
fn bulk_load_fill_rule() {
    // (2,4): up to the fill (a+b)/2 = 3 keys stay in one leaf, 4 keys split 2+2
    let p = Params::new(2, 4).unwrap();
    let w = Workers::new(2);
    let t = build_from_sorted(p, &[1u32, 2, 3], &w).unwrap();
    assert_eq!(t.to_layout(), Some(TreeLayout::leaf(vec![1, 2, 3])));
    let t = build_from_sorted(p, &[1u32, 2, 3, 4], &w).unwrap();
    let want = TreeLayout::internal(
        vec![2],
        vec![TreeLayout::leaf(vec![1, 2]), TreeLayout::leaf(vec![3, 4])],
    );
    assert_eq!(t.to_layout(), Some(want));
    assert!(t.validate().ok);
}

#[test]
fn sequential_many_join_of_three() {
    let c = WorkCounters::new();
    let p = Params::new(2, 4).unwrap();
    let parts = [vec![1u32, 2, 3], (10..60).collect(), vec![100]];
    let trees = parts
        .iter()
        .map(|k| PreparedTree::prepare(ABTree::from_sorted(p, k).unwrap(), &c))
        .collect();
    let out = join_many_seq(trees, &c).unwrap();
    assert_eq!(out.len(), 54);
    assert_eq!(out.select_ith(4).unwrap(), 10);
    assert!(out.validate().ok);
}

use crate::kripke::{is_kl_frame, Frame, KLSpec, Relation};

/// A frame on worlds `0..n` rooted at 0, as its edge mask and successor
/// lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedFrame {
    pub mask: u64,
    pub succ: Vec<Vec<usize>>,
}

impl RootedFrame {
    pub fn relation(&self) -> Relation {
        let n = self.succ.len();
        Relation::from_pairs(n, self.succ.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y))))
    }
}

/// The KL-frames on `n ≤ 5` worlds whose worlds are all reachable from 0,
/// one per isomorphism class fixing 0 (the least mask), in mask order.
pub fn rooted_frames(n: usize, kl: &KLSpec) -> Vec<RootedFrame> {
    assert!((1..=5).contains(&n), "frame enumeration supports 1 to 5 worlds");
    let perms = root_fixing_perms(n);
    let total: u64 = 1 << (n * n);
    let mut out = Vec::new();
    for mask in 0..total {
        if !all_reachable(mask, n) || !is_least(mask, n, &perms) {
            continue;
        }
        let frame = Frame::new(
            (0..n).map(|i| i.to_string()).collect(),
            Relation::from_pairs(n, edges(mask, n)),
        );
        if is_kl_frame(&frame, kl) {
            let mut succ = vec![Vec::new(); n];
            for (a, b) in edges(mask, n) {
                succ[a].push(b);
            }
            out.push(RootedFrame { mask, succ });
        }
    }
    out
}

fn edges(mask: u64, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n * n).filter(move |b| mask >> b & 1 == 1).map(move |b| (b / n, b % n))
}

fn all_reachable(mask: u64, n: usize) -> bool {
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0u32;
        for x in (0..n).filter(|x| frontier >> x & 1 == 1) {
            next |= ((mask >> (x * n)) & ((1 << n) - 1)) as u32;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == (1 << n) - 1
}

fn root_fixing_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..n).collect(), &mut vec![0], &mut out);
    out
}

fn is_least(mask: u64, n: usize, perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|p| {
        let image = edges(mask, n).fold(0u64, |acc, (a, b)| acc | 1 << (p[a] * n + p[b]));
        image >= mask
    })
}

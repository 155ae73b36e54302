//! XPath algebra: common prefixes, lowest common ancestors, and directed
//! relative paths between node pairs.
//!
//! The relative path from node `a` to node `b` walks up from `a` to their
//! lowest common ancestor and back down to `b`: the reversed remainder of
//! `a`'s path, the LCA tag, then the remainder of `b`'s path. Only tags are
//! kept; sibling indices serve tree identity, not the embedded features.

use thiserror::Error;

use crate::dom::{TagVocab, XPath, PAD_TAG_ID};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XPathError {
    #[error("paths share no common root step")]
    DisjointRoots,
}

/// Directed relative path between two nodes through their LCA.
///
/// `up_tags` ends with the LCA tag and `down_tags` starts with it, so the
/// full path is `up_tags` followed by `down_tags` minus the duplicated LCA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeXPath {
    /// Length of the common (tag, index) prefix; depth of the LCA.
    pub prefix_len: usize,
    /// rev(remainder of the source path) then the LCA tag.
    pub up_tags: Vec<String>,
    /// The LCA tag then the remainder of the target path.
    pub down_tags: Vec<String>,
}

impl RelativeXPath {
    /// Concatenated tag sequence `[rev(src remainder); lca; dst remainder]`.
    pub fn full(&self) -> Vec<&str> {
        let mut tags: Vec<&str> = self.up_tags.iter().map(String::as_str).collect();
        tags.extend(self.down_tags.iter().skip(1).map(String::as_str));
        tags
    }
}

/// Longest leading run of equal (tag, index) steps, and its length.
/// The prefix's last step is the lowest common ancestor.
pub fn common_prefix(a: &XPath, b: &XPath) -> Result<(XPath, usize), XPathError> {
    let d = a
        .steps
        .iter()
        .zip(&b.steps)
        .take_while(|(x, y)| x == y)
        .count();
    if d == 0 {
        return Err(XPathError::DisjointRoots);
    }
    Ok((XPath::new(a.steps[..d].to_vec()), d))
}

/// Directed relative path from `a` to `b`.
pub fn relative_xpath(a: &XPath, b: &XPath) -> Result<RelativeXPath, XPathError> {
    let (prefix, d) = common_prefix(a, b)?;
    let lca_tag = prefix.leaf_tag().to_string();

    let mut up_tags: Vec<String> = a.steps[d..].iter().rev().map(|s| s.tag.clone()).collect();
    up_tags.push(lca_tag.clone());

    let mut down_tags = vec![lca_tag];
    down_tags.extend(b.steps[d..].iter().map(|s| s.tag.clone()));

    Ok(RelativeXPath {
        prefix_len: d,
        up_tags,
        down_tags,
    })
}

/// Clamp a prefix length into the bias-table range `[1, d_max]`.
/// Bucket 0 is reserved for pairs involving special tokens.
pub fn prefix_bucket(d: usize, d_max: usize) -> usize {
    debug_assert!(d >= 1 && d_max >= 1);
    d.min(d_max)
}

/// Pad or truncate both halves of a relative path to `p` tag ids.
///
/// Truncation keeps the steps closest to the text node (leaf side) and
/// retains the LCA tag at the half's inner end when it fits.
pub fn fix_halves(r: &RelativeXPath, p: usize, vocab: &TagVocab) -> (Vec<u16>, Vec<u16>) {
    debug_assert!(p >= 1);
    let up = fix_half(&r.up_tags, p, vocab, true);
    let down = fix_half(&r.down_tags, p, vocab, false);
    (up, down)
}

fn fix_half(tags: &[String], p: usize, vocab: &TagVocab, lca_last: bool) -> Vec<u16> {
    let mut ids = Vec::with_capacity(p);
    if tags.len() <= p {
        ids.extend(tags.iter().map(|t| vocab.tag_id(t)));
        ids.resize(p, PAD_TAG_ID);
    } else if lca_last {
        // Up half: leaf side first, LCA tag last.
        ids.extend(tags[..p - 1].iter().map(|t| vocab.tag_id(t)));
        ids.push(vocab.tag_id(tags.last().unwrap()));
    } else {
        // Down half: LCA tag first, leaf side last.
        ids.push(vocab.tag_id(&tags[0]));
        ids.extend(tags[tags.len() - (p - 1)..].iter().map(|t| vocab.tag_id(t)));
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dom::XPathStep;

    fn path(tags: &[&str]) -> XPath {
        XPath::new(tags.iter().map(|t| XPathStep::new(*t, 1)).collect())
    }

    // The worked pair from the paper's running example: x_i at depth 5,
    // x_j at depth 6, diverging after four shared steps.
    fn example_pair() -> (XPath, XPath) {
        let a = path(&["html", "body", "div", "ul", "span"]);
        let b = path(&["html", "body", "div", "ul", "li", "a"]);
        (a, b)
    }

    #[test]
    fn common_prefix_of_diverging_paths() {
        let (a, b) = example_pair();
        let (prefix, d) = common_prefix(&a, &b).unwrap();
        assert_eq!(d, 4);
        assert_eq!(prefix.leaf_tag(), "ul");
    }

    #[test]
    fn identical_paths_share_everything() {
        let (a, _) = example_pair();
        let (prefix, d) = common_prefix(&a, &a).unwrap();
        assert_eq!(d, a.len());
        assert_eq!(prefix, a);
    }

    #[test]
    fn root_only_overlap() {
        let a = path(&["html", "body"]);
        let b = path(&["html", "head"]);
        let (prefix, d) = common_prefix(&a, &b).unwrap();
        assert_eq!(d, 1);
        assert_eq!(prefix.leaf_tag(), "html");
    }

    #[test]
    fn same_tag_different_index_breaks_prefix() {
        let a = XPath::new(vec![XPathStep::new("html", 1), XPathStep::new("div", 1)]);
        let b = XPath::new(vec![XPathStep::new("html", 1), XPathStep::new("div", 2)]);
        let (_, d) = common_prefix(&a, &b).unwrap();
        assert_eq!(d, 1);
    }

    #[test]
    fn disjoint_roots_error() {
        let a = path(&["html", "body"]);
        let b = path(&["svg", "g"]);
        assert_eq!(common_prefix(&a, &b).unwrap_err(), XPathError::DisjointRoots);
    }

    #[test]
    fn relative_path_both_directions() {
        // rel(b => a): rev([li, a]) + [ul] + [span] = [a, li, ul, span]
        let (a, b) = example_pair();
        let r = relative_xpath(&b, &a).unwrap();
        assert_eq!(r.prefix_len, 4);
        assert_eq!(r.full(), ["a", "li", "ul", "span"]);
        assert_eq!(r.up_tags, ["a", "li", "ul"]);
        assert_eq!(r.down_tags, ["ul", "span"]);

        let r = relative_xpath(&a, &b).unwrap();
        assert_eq!(r.full(), ["span", "ul", "li", "a"]);
    }

    #[test]
    fn self_pair_is_just_the_leaf() {
        let (a, _) = example_pair();
        let r = relative_xpath(&a, &a).unwrap();
        assert_eq!(r.prefix_len, a.len());
        assert_eq!(r.full(), ["span"]);
        assert_eq!(r.up_tags, ["span"]);
        assert_eq!(r.down_tags, ["span"]);
    }

    #[test]
    fn length_identity() {
        let (a, b) = example_pair();
        let r = relative_xpath(&a, &b).unwrap();
        assert_eq!(r.full().len(), a.len() + b.len() - 2 * r.prefix_len + 1);
    }

    #[test]
    fn prefix_bucket_clamps() {
        assert_eq!(prefix_bucket(4, 25), 4);
        assert_eq!(prefix_bucket(60, 25), 25);
        assert_eq!(prefix_bucket(1, 25), 1);
    }

    #[test]
    fn fix_halves_pads_and_truncates() {
        let vocab = TagVocab::standard();
        let id = |t: &str| vocab.tag_id(t);

        let r = RelativeXPath {
            prefix_len: 3,
            up_tags: vec!["a".into(), "li".into(), "ul".into()],
            down_tags: vec!["ul".into(), "span".into()],
        };
        let (up, down) = fix_halves(&r, 5, &vocab);
        assert_eq!(up, vec![id("a"), id("li"), id("ul"), PAD_TAG_ID, PAD_TAG_ID]);
        assert_eq!(down, vec![id("ul"), id("span"), PAD_TAG_ID, PAD_TAG_ID, PAD_TAG_ID]);

        // Truncation keeps the leaf side and retains the LCA tag.
        let r = RelativeXPath {
            prefix_len: 1,
            up_tags: vec![
                "a".into(),
                "li".into(),
                "ul".into(),
                "div".into(),
                "section".into(),
                "body".into(),
                "table".into(),
            ],
            down_tags: vec!["table".into(), "tr".into(), "td".into(), "b".into(), "i".into()],
        };
        let (up, down) = fix_halves(&r, 4, &vocab);
        assert_eq!(up, vec![id("a"), id("li"), id("ul"), id("table")]);
        assert_eq!(down, vec![id("table"), id("td"), id("b"), id("i")]);

        // Self-pair down half pads out.
        let r = RelativeXPath {
            prefix_len: 2,
            up_tags: vec!["td".into()],
            down_tags: vec!["td".into()],
        };
        let (up, down) = fix_halves(&r, 3, &vocab);
        assert_eq!(up, vec![id("td"), PAD_TAG_ID, PAD_TAG_ID]);
        assert_eq!(down, vec![id("td"), PAD_TAG_ID, PAD_TAG_ID]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        const TAGS: &[&str] = &["div", "span", "li", "ul", "a", "td", "tr"];

        fn arb_steps(max_len: usize) -> impl Strategy<Value = Vec<XPathStep>> {
            prop::collection::vec((0..TAGS.len(), 1u32..4), 0..max_len).prop_map(|raw| {
                raw.into_iter()
                    .map(|(t, i)| XPathStep::new(TAGS[t], i))
                    .collect()
            })
        }

        /// Two paths from one page: a shared non-empty prefix plus
        /// remainders that are forced to diverge at their first step.
        fn arb_pair() -> impl Strategy<Value = (XPath, XPath)> {
            (arb_steps(6), arb_steps(5), arb_steps(5)).prop_map(|(mut prefix, ra, mut rb)| {
                prefix.insert(0, XPathStep::new("html", 1));
                if let (Some(x), Some(y)) = (ra.first(), rb.first_mut()) {
                    if x == *y {
                        y.index += 1;
                    }
                }
                let mut a = prefix.clone();
                a.extend(ra);
                let mut b = prefix;
                b.extend(rb);
                (XPath::new(a), XPath::new(b))
            })
        }

        proptest! {
            #[test]
            fn reconstruction((a, b) in arb_pair()) {
                let (prefix, d) = common_prefix(&a, &b).unwrap();
                prop_assert_eq!(&a.steps[..d], &prefix.steps[..]);
                prop_assert_eq!(&b.steps[..d], &prefix.steps[..]);
                let mut rebuilt = prefix.steps.clone();
                rebuilt.extend_from_slice(&a.steps[d..]);
                prop_assert_eq!(rebuilt, a.steps.clone());
            }

            #[test]
            fn reversal_symmetry((a, b) in arb_pair()) {
                let fwd = relative_xpath(&a, &b).unwrap();
                let bwd = relative_xpath(&b, &a).unwrap();
                let mut reversed = fwd.full();
                reversed.reverse();
                prop_assert_eq!(reversed, bwd.full());
            }

            #[test]
            fn length_identity_holds((a, b) in arb_pair()) {
                let r = relative_xpath(&a, &b).unwrap();
                prop_assert_eq!(r.full().len(), a.len() + b.len() - 2 * r.prefix_len + 1);
                prop_assert_eq!(r.up_tags.last(), r.down_tags.first());
            }
        }
    }
}

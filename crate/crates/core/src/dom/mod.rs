//! DOM parsing: raw HTML/XML bytes to an ordered sequence of text nodes
//! with absolute XPaths.
//!
//! Each text-bearing element contributes one [`TextNode`] holding the
//! normalized concatenation of its direct text runs. Content under
//! `script`/`style`/`noscript`/`template` and comments is excluded.

mod html;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Default cap on stored XPath depth. Deeper paths keep the steps closest
/// to the leaf.
pub const DEFAULT_DEPTH_CAP: usize = 50;

#[derive(Debug, Error)]
pub enum DomError {
    #[error("malformed markup: {0}")]
    MalformedMarkup(String),
    #[error("page has no text nodes")]
    EmptyPage,
    #[error("invalid xpath string: {0}")]
    InvalidXPath(String),
}

/// One step of an absolute XPath: a lowercased tag name plus the 1-based
/// position among same-tag siblings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct XPathStep {
    pub tag: String,
    pub index: u32,
}

impl XPathStep {
    pub fn new(tag: impl Into<String>, index: u32) -> Self {
        let tag = tag.into();
        debug_assert!(!tag.is_empty() && index >= 1);
        Self { tag, index }
    }
}

/// Absolute XPath of a node: root-first sequence of steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct XPath {
    pub steps: Vec<XPathStep>,
}

impl XPath {
    pub fn new(steps: Vec<XPathStep>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Leaf-side tag of the path.
    pub fn leaf_tag(&self) -> &str {
        &self.steps.last().expect("xpath is never empty").tag
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.tag.as_str())
    }

    /// Keeps the `cap` steps closest to the leaf, dropping root steps.
    pub fn truncate_to_depth(&mut self, cap: usize) {
        if self.steps.len() > cap {
            self.steps.drain(..self.steps.len() - cap);
        }
    }
}

impl fmt::Display for XPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{}[{}]", step.tag, step.index)?;
        }
        Ok(())
    }
}

impl FromStr for XPath {
    type Err = DomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut steps = Vec::new();
        for part in s.split('/') {
            let (tag, rest) = part
                .split_once('[')
                .ok_or_else(|| DomError::InvalidXPath(s.to_string()))?;
            let index: u32 = rest
                .strip_suffix(']')
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| DomError::InvalidXPath(s.to_string()))?;
            if tag.is_empty() {
                return Err(DomError::InvalidXPath(s.to_string()));
            }
            steps.push(XPathStep::new(tag, index));
        }
        if steps.is_empty() {
            return Err(DomError::InvalidXPath(s.to_string()));
        }
        Ok(XPath::new(steps))
    }
}

/// A text node: page-local ordinal, normalized text, absolute XPath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextNode {
    pub node_id: u32,
    pub text: String,
    #[serde(with = "xpath_string")]
    pub xpath: XPath,
}

mod xpath_string {
    use super::XPath;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &XPath, s: S) -> Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<XPath, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// A parsed page: identity plus its text nodes in document order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRecord {
    pub page_id: String,
    pub website_id: String,
    pub vertical: String,
    pub nodes: Vec<TextNode>,
}

/// NFC-normalize, collapse whitespace runs to single spaces, trim.
/// An empty result signals "not a text node".
pub fn normalize_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for ch in raw.nfc() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
    }
    out
}

/// Closed tag vocabulary: the standard HTML tags plus reserved PAD and UNK.
#[derive(Debug, Clone)]
pub struct TagVocab {
    ids: HashMap<String, u16>,
    tags: Vec<String>,
}

/// Reserved tag id for padding.
pub const PAD_TAG_ID: u16 = 0;
/// Reserved tag id for tags outside the closed vocabulary.
pub const UNK_TAG_ID: u16 = 1;

// Standard HTML tags plus the legacy ones common in older page corpora.
const HTML_TAGS: &[&str] = &[
    "a", "abbr", "acronym", "address", "area", "article", "aside", "audio", "b", "base",
    "basefont", "bdi", "bdo", "big", "blockquote", "body", "br", "button", "canvas", "caption",
    "center", "cite", "code", "col", "colgroup", "data", "datalist", "dd", "del", "details",
    "dfn", "dialog", "dir", "div", "dl", "dt", "em", "embed", "fieldset", "figcaption", "figure",
    "font", "footer", "form", "frame", "frameset", "h1", "h2", "h3", "h4", "h5", "h6", "head",
    "header", "hgroup", "hr", "html", "i", "iframe", "img", "input", "ins", "kbd", "label",
    "legend", "li", "link", "main", "map", "mark", "marquee", "menu", "meta", "meter", "nav",
    "nobr", "noframes", "noscript", "object", "ol", "optgroup", "option", "output", "p", "param",
    "picture", "pre", "progress", "q", "rp", "rt", "ruby", "s", "samp", "script", "section",
    "select", "slot", "small", "source", "span", "strike", "strong", "style", "sub", "summary",
    "sup", "table", "tbody", "td", "template", "textarea", "tfoot", "th", "thead", "time",
    "title", "tr", "track", "tt", "u", "ul", "var", "video", "wbr", "xmp",
];

impl TagVocab {
    /// The default closed vocabulary of standard HTML tags.
    pub fn standard() -> Self {
        let mut tags = vec!["<pad>".to_string(), "<unk>".to_string()];
        tags.extend(HTML_TAGS.iter().map(|t| t.to_string()));
        let ids = tags
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u16))
            .collect();
        Self { ids, tags }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vocabulary index of a tag; unseen tags map to UNK.
    pub fn tag_id(&self, tag: &str) -> u16 {
        self.ids.get(tag).copied().unwrap_or(UNK_TAG_ID)
    }

    pub fn tag_name(&self, id: u16) -> &str {
        &self.tags[id as usize]
    }
}

impl Default for TagVocab {
    fn default() -> Self {
        Self::standard()
    }
}

/// Parse raw HTML/XML bytes into a page record.
///
/// Text is collected per element: the direct text runs of each element are
/// merged into one node anchored at that element, which keeps node XPaths
/// unique within the page. Node ids follow the pre-order position of the
/// anchoring element.
pub fn parse_page(
    html_bytes: &[u8],
    page_id: &str,
    website_id: &str,
    vertical: &str,
    depth_cap: usize,
) -> Result<PageRecord, DomError> {
    let source = String::from_utf8_lossy(html_bytes);
    let raw_nodes = html::extract_text_nodes(&source)?;
    if raw_nodes.is_empty() {
        return Err(DomError::EmptyPage);
    }
    let mut nodes = Vec::with_capacity(raw_nodes.len());
    for (node_id, mut raw) in raw_nodes.into_iter().enumerate() {
        raw.xpath.truncate_to_depth(depth_cap);
        nodes.push(TextNode {
            node_id: node_id as u32,
            text: raw.text,
            xpath: raw.xpath,
        });
    }
    Ok(PageRecord {
        page_id: page_id.to_string(),
        website_id: website_id.to_string(),
        vertical: vertical.to_string(),
        nodes,
    })
}

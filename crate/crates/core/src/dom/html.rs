//! Tolerant HTML tokenizer and tree walker.
//!
//! No attribute retention, no rendering: the output is the stream of
//! text-bearing elements with their (tag, sibling-index) paths. Recovery
//! rules: unmatched close tags are ignored, unclosed elements are closed
//! at the matching ancestor or at end of input.

use std::collections::HashMap;

use super::{normalize_text, DomError, XPath, XPathStep};

pub(super) struct RawTextNode {
    pub text: String,
    pub xpath: XPath,
}

const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "basefont", "br", "col", "embed", "frame", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
];

// Content skipped entirely.
const RAW_SKIP: &[&str] = &["script", "style"];
// Content kept as the element's own text; no child elements possible.
const RAW_TEXT: &[&str] = &["title", "textarea", "xmp"];
// Subtrees whose text is excluded.
const EXCLUDED_SUBTREES: &[&str] = &["noscript", "template"];

struct Frame {
    tag: String,
    path: Vec<XPathStep>,
    child_counts: HashMap<String, u32>,
    text: String,
    order: u32,
    excluded: bool,
}

struct Walker {
    stack: Vec<Frame>,
    root_counts: HashMap<String, u32>,
    next_order: u32,
    nodes: Vec<(u32, RawTextNode)>,
    saw_element: bool,
}

impl Walker {
    fn new() -> Self {
        Self {
            stack: Vec::new(),
            root_counts: HashMap::new(),
            next_order: 0,
            nodes: Vec::new(),
            saw_element: false,
        }
    }

    fn sibling_index(&mut self, tag: &str) -> u32 {
        let counts = match self.stack.last_mut() {
            Some(parent) => &mut parent.child_counts,
            None => &mut self.root_counts,
        };
        let n = counts.entry(tag.to_string()).or_insert(0);
        *n += 1;
        *n
    }

    fn child_path(&mut self, tag: &str) -> Vec<XPathStep> {
        let index = self.sibling_index(tag);
        let mut path = self
            .stack
            .last()
            .map(|f| f.path.clone())
            .unwrap_or_default();
        path.push(XPathStep::new(tag, index));
        path
    }

    fn open(&mut self, tag: &str) {
        self.saw_element = true;
        let path = self.child_path(tag);
        let excluded = self.stack.last().map(|f| f.excluded).unwrap_or(false)
            || EXCLUDED_SUBTREES.contains(&tag);
        let order = self.next_order;
        self.next_order += 1;
        self.stack.push(Frame {
            tag: tag.to_string(),
            path,
            child_counts: HashMap::new(),
            text: String::new(),
            order,
            excluded,
        });
    }

    /// A childless element consumes a sibling index and a pre-order slot.
    fn open_leaf(&mut self, tag: &str) -> (Vec<XPathStep>, u32, bool) {
        self.saw_element = true;
        let path = self.child_path(tag);
        let excluded = self.stack.last().map(|f| f.excluded).unwrap_or(false);
        let order = self.next_order;
        self.next_order += 1;
        (path, order, excluded)
    }

    fn append_text(&mut self, decoded: &str) {
        if let Some(frame) = self.stack.last_mut() {
            if !frame.excluded {
                frame.text.push_str(decoded);
            }
        }
    }

    fn pop(&mut self) {
        if let Some(frame) = self.stack.pop() {
            if !frame.excluded {
                let text = normalize_text(&frame.text);
                if !text.is_empty() {
                    self.nodes.push((
                        frame.order,
                        RawTextNode {
                            text,
                            xpath: XPath::new(frame.path),
                        },
                    ));
                }
            }
        }
    }

    /// Pop up to and including the innermost open `tag`; no-op if absent.
    fn close(&mut self, tag: &str) {
        let Some(depth) = self.stack.iter().rposition(|f| f.tag == tag) else {
            return;
        };
        while self.stack.len() > depth {
            self.pop();
        }
    }

    fn finish(mut self) -> Result<Vec<RawTextNode>, DomError> {
        while !self.stack.is_empty() {
            self.pop();
        }
        if !self.saw_element {
            return Err(DomError::MalformedMarkup(
                "no markup elements found".to_string(),
            ));
        }
        self.nodes.sort_by_key(|(order, _)| *order);
        Ok(self.nodes.into_iter().map(|(_, n)| n).collect())
    }
}

pub(super) fn extract_text_nodes(source: &str) -> Result<Vec<RawTextNode>, DomError> {
    let bytes = source.as_bytes();
    let mut walker = Walker::new();
    let mut pos = 0;

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            let end = find_byte(bytes, pos, b'<').unwrap_or(bytes.len());
            let mut decoded = String::new();
            decode_entities(&source[pos..end], &mut decoded);
            walker.append_text(&decoded);
            pos = end;
            continue;
        }
        // Markup starting at '<'.
        match bytes.get(pos + 1) {
            Some(b'/') => {
                let (name, after) = read_tag_name(source, pos + 2);
                pos = skip_to_gt(bytes, after);
                if !name.is_empty() {
                    walker.close(&name);
                }
            }
            Some(b'!') => {
                if bytes[pos + 1..].starts_with(b"!--") {
                    pos = match find_subslice(bytes, pos + 4, b"-->") {
                        Some(at) => at + 3,
                        None => bytes.len(),
                    };
                } else {
                    // DOCTYPE, CDATA, or bogus declaration.
                    pos = skip_to_gt(bytes, pos + 2);
                }
            }
            Some(b'?') => {
                pos = skip_to_gt(bytes, pos + 2);
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (name, after) = read_tag_name(source, pos + 1);
                let (self_closing, after) = skip_attributes(bytes, after);
                pos = after;
                let tag = name.as_str();
                if VOID_ELEMENTS.contains(&tag) || self_closing {
                    walker.open_leaf(tag);
                } else if RAW_SKIP.contains(&tag) {
                    walker.open_leaf(tag);
                    pos = skip_raw_content(bytes, pos, tag).1;
                } else if RAW_TEXT.contains(&tag) {
                    let (path, order, excluded) = walker.open_leaf(tag);
                    let (content_end, after_close) = skip_raw_content(bytes, pos, tag);
                    if !excluded {
                        let mut decoded = String::new();
                        decode_entities(&source[pos..content_end], &mut decoded);
                        let text = normalize_text(&decoded);
                        if !text.is_empty() {
                            walker.nodes.push((
                                order,
                                RawTextNode {
                                    text,
                                    xpath: XPath::new(path),
                                },
                            ));
                        }
                    }
                    pos = after_close;
                } else {
                    walker.open(tag);
                }
            }
            _ => {
                // Bare '<' in text (or at EOF): keep it literally.
                walker.append_text("<");
                pos += 1;
            }
        }
    }

    walker.finish()
}

fn find_byte(bytes: &[u8], from: usize, needle: u8) -> Option<usize> {
    bytes[from..].iter().position(|&b| b == needle).map(|i| from + i)
}

fn find_subslice(bytes: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    if from >= bytes.len() {
        return None;
    }
    bytes[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|i| from + i)
}

fn skip_to_gt(bytes: &[u8], from: usize) -> usize {
    match find_byte(bytes, from.min(bytes.len()), b'>') {
        Some(at) => at + 1,
        None => bytes.len(),
    }
}

/// Lowercased tag name starting at `from`; returns (name, position after it).
fn read_tag_name(source: &str, from: usize) -> (String, usize) {
    let bytes = source.as_bytes();
    let mut end = from;
    while end < bytes.len() {
        let b = bytes[end];
        if b.is_ascii_alphanumeric() || b == b'-' || b == b':' || b == b'_' {
            end += 1;
        } else {
            break;
        }
    }
    (source[from..end].to_ascii_lowercase(), end)
}

/// Skip attributes, honoring quoted values that may contain '>'.
/// Returns (self_closing, position after '>').
fn skip_attributes(bytes: &[u8], mut pos: usize) -> (bool, usize) {
    let mut self_closing = false;
    while pos < bytes.len() {
        match bytes[pos] {
            b'>' => return (self_closing, pos + 1),
            b'/' => {
                self_closing = true;
                pos += 1;
            }
            b'"' | b'\'' => {
                let quote = bytes[pos];
                self_closing = false;
                pos += 1;
                while pos < bytes.len() && bytes[pos] != quote {
                    pos += 1;
                }
                pos = (pos + 1).min(bytes.len());
            }
            _ => {
                if !bytes[pos].is_ascii_whitespace() {
                    self_closing = false;
                }
                pos += 1;
            }
        }
    }
    (self_closing, bytes.len())
}

/// Scan past raw content up to `</tag`; returns (content end, position
/// after the close tag). Unterminated content runs to end of input.
fn skip_raw_content(bytes: &[u8], from: usize, tag: &str) -> (usize, usize) {
    let mut pos = from;
    while pos < bytes.len() {
        let Some(at) = find_byte(bytes, pos, b'<') else {
            return (bytes.len(), bytes.len());
        };
        if bytes.get(at + 1) == Some(&b'/') {
            let name_start = at + 2;
            let name_end = name_start + tag.len();
            if name_end <= bytes.len()
                && bytes[name_start..name_end].eq_ignore_ascii_case(tag.as_bytes())
            {
                return (at, skip_to_gt(bytes, name_end));
            }
        }
        pos = at + 1;
    }
    (bytes.len(), bytes.len())
}

/// Decode the common named entities plus numeric character references.
/// Unknown or malformed references are kept verbatim.
fn decode_entities(raw: &str, out: &mut String) {
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = tail[..tail.len().min(12)].find(';');
        let Some(semi) = semi else {
            out.push('&');
            rest = &tail[1..];
            continue;
        };
        let entity = &tail[1..semi];
        let decoded = match entity {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some('\u{00A0}'),
            _ => entity
                .strip_prefix('#')
                .and_then(|num| {
                    if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
                        u32::from_str_radix(hex, 16).ok()
                    } else {
                        num.parse().ok()
                    }
                })
                .and_then(char::from_u32),
        };
        match decoded {
            Some(ch) => {
                out.push(ch);
                rest = &tail[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attributes_with_gt_in_quotes() {
        let nodes = extract_text_nodes("<div title=\"a > b\" data-x='1'>hi</div>").unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].text, "hi");
        assert_eq!(nodes[0].xpath.to_string(), "div[1]");
    }

    #[test]
    fn self_closing_consumes_sibling_slot() {
        let nodes = extract_text_nodes("<div><span/><span>two</span></div>").unwrap();
        assert_eq!(nodes[0].xpath.to_string(), "div[1]/span[2]");
    }

    #[test]
    fn title_text_is_kept() {
        let nodes =
            extract_text_nodes("<html><head><title>Page &amp; Co</title></head></html>").unwrap();
        assert_eq!(nodes[0].text, "Page & Co");
        assert_eq!(nodes[0].xpath.to_string(), "html[1]/head[1]/title[1]");
    }

    #[test]
    fn unmatched_close_tags_ignored() {
        let nodes = extract_text_nodes("<div></p>text</div>").unwrap();
        assert_eq!(nodes[0].text, "text");
    }

    #[test]
    fn script_with_lt_inside() {
        let nodes =
            extract_text_nodes("<div><script>if (a<b) { x(); }</script>ok</div>").unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].text, "ok");
    }

    #[test]
    fn numeric_entities() {
        let mut out = String::new();
        decode_entities("&#65;&#x42;&bogus;&#xZZ; &", &mut out);
        assert_eq!(out, "AB&bogus;&#xZZ; &");
    }

    #[test]
    fn unterminated_comment_swallows_rest() {
        let nodes = extract_text_nodes("<div>a</div><!-- open").unwrap();
        assert_eq!(nodes.len(), 1);
    }
}

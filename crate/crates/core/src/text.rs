//! Content-type detection and HTML text extraction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::model::ContentType;

/// Detects a document's type from the `Content-Type` header, then the URL
/// extension, then the leading bytes. `None` means unsupported.
pub fn detect_content_type(header: Option<&str>, url: &str, bytes: &[u8]) -> Option<ContentType> {
    if let Some(header) = header {
        let mime = header.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
        match mime.as_str() {
            "application/pdf" => return Some(ContentType::Pdf),
            "text/html" | "application/xhtml+xml" => return Some(ContentType::Html),
            "text/plain" | "text/csv" => return Some(ContentType::Plain),
            "" | "application/octet-stream" | "binary/octet-stream" => {}
            _ => return None,
        }
    }

    let path = url.split(['?', '#']).next().unwrap_or(url);
    let file = path.rsplit('/').next().unwrap_or(path);
    if let Some((_, ext)) = file.rsplit_once('.') {
        match ext.to_ascii_lowercase().as_str() {
            "pdf" => return Some(ContentType::Pdf),
            "html" | "htm" | "xhtml" => return Some(ContentType::Html),
            "txt" | "text" | "csv" | "md" => return Some(ContentType::Plain),
            _ => {}
        }
    }
    sniff(bytes)
}

fn sniff(bytes: &[u8]) -> Option<ContentType> {
    if bytes.starts_with(b"%PDF-") {
        return Some(ContentType::Pdf);
    }
    let text = core::str::from_utf8(bytes).ok()?;
    if text.contains('\0') {
        return None;
    }
    let head: String = text.trim_start().chars().take(512).collect::<String>().to_ascii_lowercase();
    if head.starts_with("<!doctype html") || head.starts_with("<html") || head.contains("<body") {
        Some(ContentType::Html)
    } else {
        Some(ContentType::Plain)
    }
}

const SKIPPED_ELEMENTS: &[&str] = &["script", "style", "noscript", "template", "head", "svg"];
const BLOCK_ELEMENTS: &[&str] = &[
    "p", "div", "br", "li", "ul", "ol", "tr", "td", "th", "table", "h1", "h2", "h3", "h4", "h5", "h6",
    "section", "article", "header", "footer", "nav", "main", "aside", "blockquote", "pre", "hr", "dt", "dd",
];

/// Visible text of an HTML document: tags removed, script/style content
/// dropped, entities decoded, whitespace collapsed with block elements on
/// separate lines.
pub fn html_to_text(html: &str) -> String {
    let mut out = String::with_capacity(html.len() / 2);
    let mut rest = html;
    while !rest.is_empty() {
        let Some(open) = rest.find('<') else {
            out.push_str(rest);
            break;
        };
        out.push_str(&rest[..open]);
        rest = &rest[open..];

        if rest.starts_with("<!--") {
            rest = rest.find("-->").map_or("", |end| &rest[end + 3..]);
            continue;
        }
        let Some(close) = rest.find('>') else {
            break;
        };
        let tag = &rest[1..close];
        rest = &rest[close + 1..];

        let closing = tag.starts_with('/');
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if name.is_empty() {
            continue;
        }
        if !closing && !tag.ends_with('/') && SKIPPED_ELEMENTS.contains(&name.as_str()) {
            rest = skip_element(rest, &name);
            continue;
        }
        if BLOCK_ELEMENTS.contains(&name.as_str()) {
            out.push('\n');
        } else {
            out.push(' ');
        }
    }
    collapse_whitespace(&decode_entities(&out))
}

fn skip_element<'a>(rest: &'a str, name: &str) -> &'a str {
    let lower = rest.to_ascii_lowercase();
    let needle = alloc::format!("</{name}");
    match lower.find(&needle) {
        Some(pos) => match rest[pos..].find('>') {
            Some(end) => &rest[pos + end + 1..],
            None => "",
        },
        None => "",
    }
}

fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let entity_end = rest[1..].find(|c: char| c == ';' || c.is_whitespace() || c == '&').map(|i| i + 1);
        match entity_end {
            Some(end) if rest.as_bytes()[end] == b';' && end <= 12 => {
                let entity = &rest[1..end];
                match decode_entity(entity) {
                    Some(c) => {
                        out.push(c);
                        rest = &rest[end + 1..];
                    }
                    None => {
                        out.push('&');
                        rest = &rest[1..];
                    }
                }
            }
            _ => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_entity(entity: &str) -> Option<char> {
    if let Some(num) = entity.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code);
    }
    Some(match entity {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => ' ',
        "ndash" => '-',
        "mdash" => '-',
        "rsquo" | "lsquo" => '\'',
        "rdquo" | "ldquo" => '"',
        "eacute" => 'é',
        "uuml" => 'ü',
        "ouml" => 'ö',
        "auml" => 'ä',
        _ => return None,
    })
}

fn collapse_whitespace(text: &str) -> String {
    let lines: Vec<String> = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect();
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_tags_and_scripts() {
        assert_eq!(html_to_text("<p>Acme</p><script>x</script>"), "Acme");
        assert_eq!(
            html_to_text("<html><head><title>t</title></head><body><h1>Suppliers</h1><ul><li>Acme &amp; Sons</li><li>Beta</li></ul><style>p{}</style></body></html>"),
            "Suppliers\nAcme & Sons\nBeta"
        );
        assert_eq!(html_to_text("a<!-- hidden -->b"), "ab");
        assert_eq!(html_to_text("x &#65;&#x42; &bogus; y"), "x AB &bogus; y");
        assert_eq!(html_to_text("<SCRIPT type='a'>1 < 2</SCRIPT>ok"), "ok");
    }

    #[test]
    fn content_type_detection() {
        assert_eq!(detect_content_type(None, "https://x/list.pdf", b"junk"), Some(ContentType::Pdf));
        assert_eq!(detect_content_type(None, "file.txt", b"Acme Corp sup"), Some(ContentType::Plain));
        assert_eq!(
            detect_content_type(Some("text/html; charset=utf-8"), "https://x/list.pdf", b""),
            Some(ContentType::Html)
        );
        assert_eq!(detect_content_type(Some("image/png"), "https://x/a", b""), None);
        assert_eq!(detect_content_type(None, "https://x/a", b"%PDF-1.7"), Some(ContentType::Pdf));
        assert_eq!(
            detect_content_type(None, "https://x/a", b"  <!DOCTYPE html><html>"),
            Some(ContentType::Html)
        );
        assert_eq!(detect_content_type(None, "https://x/a", b"hello world 12"), Some(ContentType::Plain));
        assert_eq!(detect_content_type(None, "https://x/a", &[0xff, 0xfe, 0x00]), None);
    }
}

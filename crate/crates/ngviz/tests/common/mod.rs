//! Shared helpers for integration tests.
#![allow(dead_code)]

/// Minimal XML well-formedness check, written independently of the SVG
/// renderer: single root, balanced and properly nested tags, quoted
/// attributes with no duplicates, no raw `<` or `&` in text content.
pub fn check_well_formed_xml(doc: &str) -> Result<(), String> {
    let bytes = doc.as_bytes();
    let mut pos = 0usize;
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0usize;

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            if bytes[pos] == b'&' {
                // only the five predefined entities are allowed
                let rest = &doc[pos..];
                let ok = ["&amp;", "&lt;", "&gt;", "&quot;", "&apos;"]
                    .iter()
                    .any(|e| rest.starts_with(e));
                if !ok {
                    return Err(format!("raw '&' at byte {pos}"));
                }
            }
            if !stack.is_empty() || bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            return Err(format!("text outside the root element at byte {pos}"));
        }
        // a tag starts here
        let end = doc[pos..]
            .find('>')
            .map(|i| pos + i)
            .ok_or_else(|| format!("unterminated tag at byte {pos}"))?;
        let inner = &doc[pos + 1..end];
        if let Some(name) = inner.strip_prefix('/') {
            let name = name.trim();
            match stack.pop() {
                Some(open) if open == name => {}
                Some(open) => return Err(format!("</{name}> closes <{open}>")),
                None => return Err(format!("</{name}> with no open element")),
            }
            if stack.is_empty() {
                roots += 1;
            }
        } else {
            let self_closing = inner.ends_with('/');
            let inner = inner.strip_suffix('/').unwrap_or(inner);
            let (name, attrs) = parse_tag(inner).map_err(|e| format!("byte {pos}: {e}"))?;
            if stack.is_empty() && roots > 0 {
                return Err(format!("second root element <{name}>"));
            }
            if self_closing {
                if stack.is_empty() {
                    roots += 1;
                }
            } else {
                stack.push(name);
            }
            let mut seen = std::collections::HashSet::new();
            for attr in attrs {
                if !seen.insert(attr.clone()) {
                    return Err(format!("duplicate attribute {attr:?}"));
                }
            }
        }
        pos = end + 1;
    }
    if !stack.is_empty() {
        return Err(format!("unclosed elements: {stack:?}"));
    }
    if roots != 1 {
        return Err(format!("expected exactly one root element, found {roots}"));
    }
    Ok(())
}

/// Split a start tag into its name and attribute names, checking that
/// every attribute value is double-quoted and free of `<` and `"`.
fn parse_tag(inner: &str) -> Result<(String, Vec<String>), String> {
    let inner = inner.trim();
    let name_end = inner
        .find(|c: char| c.is_ascii_whitespace())
        .unwrap_or(inner.len());
    let name = &inner[..name_end];
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == ':' || c == '-') {
        return Err(format!("bad element name {name:?}"));
    }
    let mut attrs = Vec::new();
    let mut rest = inner[name_end..].trim_start();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| format!("attribute without value near {rest:?}"))?;
        let attr = rest[..eq].trim().to_string();
        if attr.is_empty() {
            return Err("empty attribute name".into());
        }
        let after = &rest[eq + 1..];
        if !after.starts_with('"') {
            return Err(format!("unquoted value for {attr:?}"));
        }
        let close = after[1..]
            .find('"')
            .ok_or_else(|| format!("unterminated value for {attr:?}"))?;
        if after[1..1 + close].contains('<') {
            return Err(format!("'<' inside value of {attr:?}"));
        }
        attrs.push(attr);
        rest = after[close + 2..].trim_start();
    }
    Ok((name.to_string(), attrs))
}

/// Every plotted coordinate in the SVG: polyline points plus circle
/// centers. Used to confirm nothing escapes the viewBox.
pub fn plotted_coordinates(svg: &str) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for line in svg.lines() {
        if line.starts_with("<polyline") {
            if let Some(points) = attr_value(line, "points") {
                for pair in points.split(' ') {
                    if let Some((x, y)) = pair.split_once(',') {
                        out.push((x.parse().unwrap(), y.parse().unwrap()));
                    }
                }
            }
        } else if line.starts_with("<circle") {
            let cx = attr_value(line, "cx").unwrap().parse().unwrap();
            let cy = attr_value(line, "cy").unwrap().parse().unwrap();
            out.push((cx, cy));
        }
    }
    out
}

pub fn attr_value<'a>(line: &'a str, attr: &str) -> Option<&'a str> {
    let needle = format!("{attr}=\"");
    let start = line.find(&needle)? + needle.len();
    let end = line[start..].find('"')? + start;
    Some(&line[start..end])
}

#[test]
fn xml_checker_rejects_breakage() {
    assert!(check_well_formed_xml("<a><b/></a>").is_ok());
    assert!(check_well_formed_xml("<a x=\"1\">text</a>").is_ok());
    assert!(check_well_formed_xml("<a><b></a>").is_err()); // bad nesting
    assert!(check_well_formed_xml("<a></a><b/>").is_err()); // two roots
    assert!(check_well_formed_xml("<a x=1></a>").is_err()); // unquoted
    assert!(check_well_formed_xml("<a x=\"1\" x=\"2\"/>").is_err()); // dup attr
    assert!(check_well_formed_xml("<a>a & b</a>").is_err()); // raw ampersand
    assert!(check_well_formed_xml("<a>&amp; ok</a>").is_ok());
    assert!(check_well_formed_xml("<a").is_err());
}

//! Streaming parser and writer for the supported MEDLINE citation subset.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Read;

use flate2::read::GzDecoder;
use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{DocumentRecord, PartialDate, DEFAULT_PUB_TYPE, PUBLISHED_ERRATUM, RETRACTED_PUBLICATION};
use crate::error::{Error, Result};
use crate::Pmid;

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Outcome of parsing one batch file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedBatch {
    pub records: Vec<DocumentRecord>,
    /// Citations dropped for lacking a PMID or a title.
    pub skipped: usize,
    /// PMIDs that occurred more than once; the last occurrence was kept.
    pub duplicates: Vec<Pmid>,
}

/// Inflates gzip input; anything else is returned unchanged.
pub fn decode_batch_bytes(bytes: &[u8]) -> Result<Cow<'_, [u8]>> {
    if bytes.starts_with(&GZIP_MAGIC) {
        let mut out = Vec::with_capacity(bytes.len() * 4);
        GzDecoder::new(bytes).read_to_end(&mut out)?;
        Ok(Cow::Owned(out))
    } else {
        Ok(Cow::Borrowed(bytes))
    }
}

#[derive(Default)]
struct AuthorBuilder {
    last_name: String,
    fore_name: String,
    initials: String,
    collective: String,
}

impl AuthorBuilder {
    fn abbreviation(self) -> Option<String> {
        let collective = collapse_ws(&self.collective);
        if !collective.is_empty() {
            return Some(collective);
        }
        let last = collapse_ws(&self.last_name);
        if last.is_empty() {
            return None;
        }
        let mut initials = collapse_ws(&self.initials).replace(' ', "");
        if initials.is_empty() {
            initials = self
                .fore_name
                .split_whitespace()
                .filter_map(|w| w.chars().next())
                .collect();
        }
        Some(if initials.is_empty() {
            last
        } else {
            format!("{last} {initials}")
        })
    }
}

#[derive(Default)]
struct CitationBuilder {
    pmid: String,
    title: String,
    abstract_parts: Vec<String>,
    abstract_part: String,
    journal_name: String,
    iso_abbrev: String,
    year: String,
    month: String,
    day: String,
    medline_date: String,
    authors: Vec<String>,
    author: Option<AuthorBuilder>,
    language: Option<String>,
    lang_buf: String,
    pub_types: BTreeSet<String>,
    pub_type_buf: String,
    retraction_link: bool,
}

impl CitationBuilder {
    fn finish(self) -> Option<DocumentRecord> {
        let pmid: Pmid = self.pmid.trim().parse().ok().filter(|p| *p > 0)?;
        let title = collapse_ws(&self.title);
        if title.is_empty() {
            return None;
        }
        let pub_date = self.pub_date();
        let mut pub_types = self.pub_types;
        if pub_types.is_empty() {
            pub_types.insert(DEFAULT_PUB_TYPE.to_owned());
        }
        Some(DocumentRecord {
            pmid,
            title,
            abstract_text: self.abstract_parts.join(" "),
            journal_name: collapse_ws(&self.journal_name),
            journal_iso_abbrev: collapse_ws(&self.iso_abbrev),
            authors: self.authors,
            pub_date,
            is_erratum: pub_types.contains(PUBLISHED_ERRATUM),
            is_retracted: self.retraction_link || pub_types.contains(RETRACTED_PUBLICATION),
            pub_types,
            language: self.language.unwrap_or_else(|| "und".into()),
        })
    }

    fn pub_date(&self) -> Option<PartialDate> {
        let (year, month, day) = if !self.year.trim().is_empty() {
            let year = self.year.trim().parse().ok()?;
            let month = parse_month(&self.month);
            let day = month.and(self.day.trim().parse::<u8>().ok());
            (year, month, day)
        } else {
            // MedlineDate, e.g. "1998 Dec-1999 Jan" or "2000 Spring".
            let mut words = self.medline_date.split_whitespace();
            let year = words.next()?.get(..4)?.parse().ok()?;
            let month = words
                .next()
                .and_then(|w| parse_month(w.split('-').next().unwrap_or("")));
            (year, month, None)
        };
        PartialDate::new(year, month, day).ok()
    }
}

fn parse_month(text: &str) -> Option<u8> {
    const NAMES: [&str; 12] = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ];
    let text = text.trim();
    if let Ok(n) = text.parse::<u8>() {
        return (1..=12).contains(&n).then_some(n);
    }
    let prefix = text.get(..3)?.to_ascii_lowercase();
    NAMES.iter().position(|m| *m == prefix).map(|i| i as u8 + 1)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn xml_error(reader: &Reader<&[u8]>, err: impl std::fmt::Display) -> Error {
    Error::Xml {
        offset: reader.error_position(),
        message: err.to_string(),
    }
}

/// Parses a batch of citations (raw or gzip-compressed XML).
///
/// The citation unit is `MedlineCitation`, so both `PubmedArticleSet` and bare
/// `MedlineCitationSet` files are accepted. Malformed XML is an error carrying
/// the byte offset; citations without a PMID or title are skipped and counted.
pub fn parse_document_batch(xml_bytes: &[u8]) -> Result<ParsedBatch> {
    let bytes = decode_batch_bytes(xml_bytes)?;
    let mut reader = Reader::from_reader(bytes.as_ref());
    reader.config_mut().trim_text(false);

    let mut out = ParsedBatch::default();
    let mut positions: HashMap<Pmid, usize> = HashMap::new();
    let mut stack: Vec<String> = Vec::new();
    // Depth of the open MedlineCitation element, if any.
    let mut citation_at: Option<usize> = None;
    let mut builder = CitationBuilder::default();
    let mut buf = Vec::new();

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(&reader, e))?;
        match event {
            Event::Start(e) => {
                let name = element_name(&e);
                if name == "MedlineCitation" && citation_at.is_none() {
                    citation_at = Some(stack.len());
                    builder = CitationBuilder::default();
                }
                stack.push(name);
                if let Some(at) = citation_at {
                    on_open(&mut builder, &stack[at + 1..], &e, &reader)?;
                }
            }
            Event::Empty(e) => {
                if let Some(at) = citation_at {
                    stack.push(element_name(&e));
                    on_open(&mut builder, &stack[at + 1..], &e, &reader)?;
                    on_close(&mut builder, &stack[at + 1..]);
                    stack.pop();
                }
            }
            Event::End(_) => {
                if let Some(at) = citation_at {
                    if stack.len() == at + 1 {
                        citation_at = None;
                        let finished = std::mem::take(&mut builder).finish();
                        match finished {
                            Some(record) => push_record(&mut out, &mut positions, record),
                            None => out.skipped += 1,
                        }
                    } else {
                        on_close(&mut builder, &stack[at + 1..]);
                    }
                }
                stack.pop();
            }
            Event::Text(t) => {
                if let Some(at) = citation_at {
                    let text = t.unescape().map_err(|e| xml_error(&reader, e))?;
                    on_text(&mut builder, &stack[at + 1..], &text);
                }
            }
            Event::CData(t) => {
                if let Some(at) = citation_at {
                    let text = String::from_utf8_lossy(&t);
                    on_text(&mut builder, &stack[at + 1..], &text);
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !stack.is_empty() {
        return Err(Error::Xml {
            offset: reader.buffer_position(),
            message: format!("unexpected end of input inside <{}>", stack.join("/")),
        });
    }
    Ok(out)
}

fn push_record(out: &mut ParsedBatch, positions: &mut HashMap<Pmid, usize>, record: DocumentRecord) {
    let pmid = record.pmid;
    if let Some(&old) = positions.get(&pmid) {
        tracing::warn!(pmid, "duplicate PMID in batch, keeping the last occurrence");
        out.duplicates.push(pmid);
        out.records.remove(old);
        for pos in positions.values_mut() {
            if *pos > old {
                *pos -= 1;
            }
        }
    }
    positions.insert(pmid, out.records.len());
    out.records.push(record);
}

fn element_name(e: &BytesStart<'_>) -> String {
    String::from_utf8_lossy(e.local_name().as_ref()).into_owned()
}

fn on_open(
    b: &mut CitationBuilder,
    path: &[String],
    e: &BytesStart<'_>,
    reader: &Reader<&[u8]>,
) -> Result<()> {
    match path_strs(path).as_slice() {
        ["Article", "AuthorList", "Author"] => b.author = Some(AuthorBuilder::default()),
        ["CommentsCorrectionsList", "CommentsCorrections"] => {
            for attr in e.attributes() {
                let attr = attr.map_err(|err| xml_error(reader, err))?;
                if attr.key.as_ref() == b"RefType" && attr.value.as_ref() == b"RetractionIn" {
                    b.retraction_link = true;
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn on_close(b: &mut CitationBuilder, path: &[String]) {
    match path_strs(path).as_slice() {
        ["Article", "Abstract", "AbstractText"] => {
            let part = collapse_ws(&std::mem::take(&mut b.abstract_part));
            if !part.is_empty() {
                b.abstract_parts.push(part);
            }
        }
        ["Article", "AuthorList", "Author"] => {
            if let Some(abbrev) = b.author.take().and_then(AuthorBuilder::abbreviation) {
                b.authors.push(abbrev);
            }
        }
        ["Article", "Language"] => {
            let lang = std::mem::take(&mut b.lang_buf).trim().to_owned();
            if b.language.is_none() && !lang.is_empty() {
                b.language = Some(lang);
            }
        }
        ["Article", "PublicationTypeList", "PublicationType"] => {
            let label = collapse_ws(&std::mem::take(&mut b.pub_type_buf));
            if !label.is_empty() {
                b.pub_types.insert(label);
            }
        }
        _ => {}
    }
}

fn on_text(b: &mut CitationBuilder, path: &[String], text: &str) {
    let target: Option<&mut String> = match path_strs(path).as_slice() {
        ["PMID"] => Some(&mut b.pmid),
        ["Article", "ArticleTitle", ..] => Some(&mut b.title),
        ["Article", "Abstract", "AbstractText", ..] => Some(&mut b.abstract_part),
        ["Article", "Journal", "Title"] => Some(&mut b.journal_name),
        ["Article", "Journal", "ISOAbbreviation"] => Some(&mut b.iso_abbrev),
        ["Article", "Journal", "JournalIssue", "PubDate", field] => match *field {
            "Year" => Some(&mut b.year),
            "Month" => Some(&mut b.month),
            "Day" => Some(&mut b.day),
            "MedlineDate" => Some(&mut b.medline_date),
            _ => None,
        },
        ["Article", "AuthorList", "Author", field] => b.author.as_mut().and_then(|a| match *field {
            "LastName" => Some(&mut a.last_name),
            "ForeName" => Some(&mut a.fore_name),
            "Initials" => Some(&mut a.initials),
            "CollectiveName" => Some(&mut a.collective),
            _ => None,
        }),
        ["Article", "Language"] => Some(&mut b.lang_buf),
        ["Article", "PublicationTypeList", "PublicationType"] => Some(&mut b.pub_type_buf),
        _ => None,
    };
    if let Some(target) = target {
        target.push_str(text);
    }
}

fn path_strs(path: &[String]) -> Vec<&str> {
    path.iter().map(String::as_str).collect()
}

/// Serializes records in the same element subset the parser reads.
///
/// Authors are written as `CollectiveName` so abbreviations survive unchanged.
pub fn write_document_batch(records: &[DocumentRecord]) -> String {
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<PubmedArticleSet>\n");
    for r in records {
        xml.push_str("<PubmedArticle><MedlineCitation Status=\"MEDLINE\">");
        let _ = write!(xml, "<PMID Version=\"1\">{}</PMID><Article>", r.pmid);
        xml.push_str("<Journal><JournalIssue><PubDate>");
        if let Some(d) = r.pub_date {
            let _ = write!(xml, "<Year>{}</Year>", d.year());
            if let Some(m) = d.month() {
                let _ = write!(xml, "<Month>{m:02}</Month>");
            }
            if let Some(day) = d.day() {
                let _ = write!(xml, "<Day>{day:02}</Day>");
            }
        }
        xml.push_str("</PubDate></JournalIssue>");
        let _ = write!(
            xml,
            "<Title>{}</Title><ISOAbbreviation>{}</ISOAbbreviation></Journal>",
            escape(r.journal_name.as_str()),
            escape(r.journal_iso_abbrev.as_str())
        );
        let _ = write!(xml, "<ArticleTitle>{}</ArticleTitle>", escape(r.title.as_str()));
        if !r.abstract_text.is_empty() {
            let _ = write!(
                xml,
                "<Abstract><AbstractText>{}</AbstractText></Abstract>",
                escape(r.abstract_text.as_str())
            );
        }
        if !r.authors.is_empty() {
            xml.push_str("<AuthorList>");
            for a in &r.authors {
                let _ = write!(
                    xml,
                    "<Author><CollectiveName>{}</CollectiveName></Author>",
                    escape(a.as_str())
                );
            }
            xml.push_str("</AuthorList>");
        }
        let _ = write!(xml, "<Language>{}</Language>", escape(r.language.as_str()));
        xml.push_str("<PublicationTypeList>");
        for t in &r.pub_types {
            let _ = write!(xml, "<PublicationType>{}</PublicationType>", escape(t.as_str()));
        }
        xml.push_str("</PublicationTypeList></Article>");
        if r.is_retracted && !r.pub_types.contains(RETRACTED_PUBLICATION) {
            xml.push_str(
                "<CommentsCorrectionsList><CommentsCorrections RefType=\"RetractionIn\">\
                 <RefSource>Retraction notice</RefSource></CommentsCorrections>\
                 </CommentsCorrectionsList>",
            );
        }
        xml.push_str("</MedlineCitation></PubmedArticle>\n");
    }
    xml.push_str("</PubmedArticleSet>\n");
    xml
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn citation(body: &str) -> String {
        format!("<PubmedArticleSet><PubmedArticle><MedlineCitation>{body}</MedlineCitation></PubmedArticle></PubmedArticleSet>")
    }

    #[test]
    fn minimal_citation() {
        let xml = citation("<PMID>1</PMID><Article><ArticleTitle>T</ArticleTitle></Article>");
        let batch = parse_document_batch(xml.as_bytes()).unwrap();
        assert_eq!(batch.records.len(), 1);
        let r = &batch.records[0];
        assert_eq!((r.pmid, r.title.as_str(), r.abstract_text.as_str()), (1, "T", ""));
        assert_eq!(r.pub_date, None);
        assert!(!r.pub_types.is_empty());
    }

    #[test]
    fn publication_type_and_language_pass_through() {
        let xml = citation(
            "<PMID>7</PMID><Article><ArticleTitle>x</ArticleTitle><Language>eng</Language>\
             <PublicationTypeList><PublicationType UI=\"D016454\">Review</PublicationType></PublicationTypeList></Article>",
        );
        let r = &parse_document_batch(xml.as_bytes()).unwrap().records[0];
        assert_eq!(r.pub_types, BTreeSet::from(["Review".to_string()]));
        assert_eq!(r.language, "eng");
    }

    #[test]
    fn citation_without_title_is_skipped() {
        let xml = "<PubmedArticleSet>\
            <PubmedArticle><MedlineCitation><PMID>1</PMID><Article><ArticleTitle>One</ArticleTitle></Article></MedlineCitation></PubmedArticle>\
            <PubmedArticle><MedlineCitation><PMID>2</PMID><Article><ArticleTitle>  </ArticleTitle></Article></MedlineCitation></PubmedArticle>\
            <PubmedArticle><MedlineCitation><PMID>3</PMID><Article><ArticleTitle>Three</ArticleTitle></Article></MedlineCitation></PubmedArticle>\
            </PubmedArticleSet>";
        let batch = parse_document_batch(xml.as_bytes()).unwrap();
        let expected = vec![DocumentRecord::new(1, "One"), DocumentRecord::new(3, "Three")];
        let mut got = batch.records.clone();
        for r in &mut got {
            r.language = "eng".into();
        }
        assert_eq!(got, expected);
        assert_eq!(batch.skipped, 1);
    }

    #[test]
    fn full_citation_fields() {
        let xml = citation(
            r#"<PMID Version="1">28976851</PMID>
            <Article>
              <Journal>
                <JournalIssue><PubDate><Year>2017</Year><Month>Jul</Month><Day>5</Day></PubDate></JournalIssue>
                <Title>The New England journal of medicine</Title>
                <ISOAbbreviation>N. Engl. J. Med.</ISOAbbreviation>
              </Journal>
              <ArticleTitle>Acute <i>Myocardial</i> Infarction.</ArticleTitle>
              <Abstract>
                <AbstractText Label="BACKGROUND">First part &amp; more.</AbstractText>
                <AbstractText Label="RESULTS">Second part.</AbstractText>
              </Abstract>
              <AuthorList>
                <Author><LastName>Reed</LastName><ForeName>Grant W</ForeName><Initials>GW</Initials></Author>
                <Author><LastName>Rossi</LastName><ForeName>Jeffrey E</ForeName></Author>
                <Author><CollectiveName>TIMI Study Group</CollectiveName></Author>
              </AuthorList>
              <Language>eng</Language>
              <PublicationTypeList>
                <PublicationType>Journal Article</PublicationType>
                <PublicationType>Review</PublicationType>
              </PublicationTypeList>
            </Article>
            <CommentsCorrectionsList>
              <CommentsCorrections RefType="CommentIn"><PMID>999</PMID></CommentsCorrections>
            </CommentsCorrectionsList>"#,
        );
        let r = &parse_document_batch(xml.as_bytes()).unwrap().records[0];
        assert_eq!(r.pmid, 28976851);
        assert_eq!(r.title, "Acute Myocardial Infarction.");
        assert_eq!(r.abstract_text, "First part & more. Second part.");
        assert_eq!(r.journal_name, "The New England journal of medicine");
        assert_eq!(r.journal_iso_abbrev, "N. Engl. J. Med.");
        assert_eq!(r.authors, ["Reed GW", "Rossi JE", "TIMI Study Group"]);
        assert_eq!(r.pub_date, Some(PartialDate::new(2017, Some(7), Some(5)).unwrap()));
        assert!(!r.is_erratum && !r.is_retracted);
    }

    #[test]
    fn erratum_and_retraction_markers() {
        let xml = "<MedlineCitationSet>\
            <MedlineCitation><PMID>1</PMID><Article><ArticleTitle>a</ArticleTitle>\
              <PublicationTypeList><PublicationType>Published Erratum</PublicationType></PublicationTypeList></Article></MedlineCitation>\
            <MedlineCitation><PMID>2</PMID><Article><ArticleTitle>b</ArticleTitle>\
              <PublicationTypeList><PublicationType>Retracted Publication</PublicationType></PublicationTypeList></Article></MedlineCitation>\
            <MedlineCitation><PMID>3</PMID><Article><ArticleTitle>c</ArticleTitle></Article>\
              <CommentsCorrectionsList><CommentsCorrections RefType=\"RetractionIn\"><PMID>9</PMID></CommentsCorrections></CommentsCorrectionsList></MedlineCitation>\
            </MedlineCitationSet>";
        let recs = parse_document_batch(xml.as_bytes()).unwrap().records;
        let flags: Vec<_> = recs.iter().map(|r| (r.is_erratum, r.is_retracted)).collect();
        assert_eq!(flags, [(true, false), (false, true), (false, true)]);
    }

    #[test]
    fn comment_pmids_do_not_override_citation_pmid() {
        let xml = citation(
            "<PMID>5</PMID><Article><ArticleTitle>t</ArticleTitle></Article>\
             <CommentsCorrectionsList><CommentsCorrections RefType=\"ErratumIn\"><PMID>77</PMID></CommentsCorrections></CommentsCorrectionsList>",
        );
        let r = &parse_document_batch(xml.as_bytes()).unwrap().records[0];
        assert_eq!(r.pmid, 5);
        assert!(!r.is_erratum);
    }

    #[test]
    fn medline_date_fallback() {
        let xml = citation(
            "<PMID>5</PMID><Article><Journal><JournalIssue><PubDate><MedlineDate>1998 Dec-1999 Jan</MedlineDate></PubDate></JournalIssue></Journal><ArticleTitle>t</ArticleTitle></Article>",
        );
        let r = &parse_document_batch(xml.as_bytes()).unwrap().records[0];
        assert_eq!(r.pub_date, Some(PartialDate::new(1998, Some(12), None).unwrap()));
    }

    #[test]
    fn duplicate_pmid_last_wins() {
        let xml = "<PubmedArticleSet>\
            <MedlineCitation><PMID>1</PMID><Article><ArticleTitle>old</ArticleTitle></Article></MedlineCitation>\
            <MedlineCitation><PMID>2</PMID><Article><ArticleTitle>two</ArticleTitle></Article></MedlineCitation>\
            <MedlineCitation><PMID>1</PMID><Article><ArticleTitle>new</ArticleTitle></Article></MedlineCitation>\
            </PubmedArticleSet>";
        let batch = parse_document_batch(xml.as_bytes()).unwrap();
        let titles: Vec<_> = batch.records.iter().map(|r| r.title.as_str()).collect();
        assert_eq!(titles, ["two", "new"]);
        assert_eq!(batch.duplicates, [1]);
    }

    #[test]
    fn malformed_xml_reports_offset() {
        let xml = "<PubmedArticleSet><MedlineCitation><PMID>1</PMID></Oops></PubmedArticleSet>";
        match parse_document_batch(xml.as_bytes()) {
            Err(Error::Xml { offset, .. }) => assert!(offset > 0 && offset <= xml.len() as u64),
            other => panic!("expected XML error, got {other:?}"),
        }
        let truncated = "<PubmedArticleSet><MedlineCitation><PMID>1</PMID>";
        assert!(matches!(parse_document_batch(truncated.as_bytes()), Err(Error::Xml { .. })));
    }

    #[test]
    fn gzip_input_is_accepted() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let xml = citation("<PMID>4</PMID><Article><ArticleTitle>zipped</ArticleTitle></Article>");
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(xml.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        let batch = parse_document_batch(&gz).unwrap();
        assert_eq!(batch.records[0].title, "zipped");
    }

    fn arb_record() -> impl Strategy<Value = DocumentRecord> {
        let text = "[A-Za-z0-9<>&\"' ]{0,30}";
        (
            1u32..1_000_000,
            "[A-Za-z][A-Za-z0-9&<> ]{0,30}",
            text,
            text,
            prop::collection::vec("[A-Z][a-z]{1,8} [A-Z]{1,2}", 0..4),
            prop::option::of((1900i32..2030, prop::option::of((1u8..=12, prop::option::of(1u8..=28))))),
            prop::collection::btree_set(
                prop::sample::select(vec!["Review", "Journal Article", "Practice Guideline", "Published Erratum", "Retracted Publication"]),
                1..3,
            ),
            prop::sample::select(vec!["eng", "fre", "ger"]),
            any::<bool>(),
        )
            .prop_map(|(pmid, title, abs, journal, authors, date, types, lang, link)| {
                let pub_types: BTreeSet<String> = types.into_iter().map(String::from).collect();
                DocumentRecord {
                    pmid,
                    title,
                    abstract_text: abs,
                    journal_name: journal.clone(),
                    journal_iso_abbrev: journal,
                    authors,
                    pub_date: date.map(|(y, md)| {
                        let (m, d) = md.map_or((None, None), |(m, d)| (Some(m), d));
                        PartialDate::new(y, m, d).unwrap()
                    }),
                    is_erratum: pub_types.contains(PUBLISHED_ERRATUM),
                    is_retracted: link || pub_types.contains(RETRACTED_PUBLICATION),
                    pub_types,
                    language: lang.into(),
                }
            })
    }

    proptest! {
        #[test]
        fn parse_write_parse_round_trip(records in prop::collection::vec(arb_record(), 0..6)) {
            let first = parse_document_batch(write_document_batch(&records).as_bytes()).unwrap();
            let second = parse_document_batch(write_document_batch(&first.records).as_bytes()).unwrap();
            prop_assert_eq!(&first.records, &second.records);
        }
    }
}

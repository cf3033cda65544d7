#include "xml.hpp"

#include <cstdlib>

#include "unicode.hpp"
#include "util.hpp"

namespace aetas::xml {

namespace {

class Cursor {
 public:
  Cursor(std::string_view s, const Callbacks& cb) : s_(s), cb_(cb) {}

  void run() {
    if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;  // BOM
    std::string pending_text;
    while (pos_ < s_.size()) {
      if (s_[pos_] != '<') {
        pending_text += read_text_run();
        continue;
      }
      flush_text(pending_text);
      if (match("<?")) {
        skip_until("?>");
      } else if (match("<!--")) {
        skip_until("-->");
      } else if (match("<![CDATA[")) {
        std::size_t end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        if (cb_.text) cb_.text(std::string(s_.substr(pos_, end - pos_)));
        pos_ = end + 3;
      } else if (match("<!")) {
        skip_doctype();
      } else if (match("</")) {
        read_end_tag();
      } else {
        read_start_tag();
      }
    }
    flush_text(pending_text);
    if (!open_.empty()) fail("unclosed element <" + open_.back() + ">");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("malformed XML at byte " + std::to_string(pos_) + ": " + what);
  }

  bool match(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void skip_until(std::string_view tok) {
    std::size_t end = s_.find(tok, pos_);
    if (end == std::string_view::npos) fail("unterminated construct");
    pos_ = end + tok.size();
  }

  void skip_doctype() {
    int brackets = 0;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '[') ++brackets;
      else if (c == ']') --brackets;
      else if (c == '>' && brackets == 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' ||
                                s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  static bool name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c == ':' || static_cast<unsigned char>(c) >= 0x80;
  }
  static bool name_char(char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  }

  std::string read_name() {
    if (pos_ >= s_.size() || !name_start(s_[pos_])) fail("expected name");
    std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (!ent.empty() && ent[0] == '#') {
        long cp = 0;
        if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
          cp = std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16);
        else
          cp = std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10);
        if (cp <= 0 || cp > 0x10FFFF) fail("invalid character reference");
        unicode::encode(static_cast<char32_t>(cp), out);
      } else {
        fail("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  std::string read_text_run() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '<') ++pos_;
    return decode_entities(s_.substr(start, pos_ - start));
  }

  void flush_text(std::string& t) {
    if (!t.empty()) {
      if (cb_.text) cb_.text(t);
      t.clear();
    }
  }

  void read_end_tag() {
    std::string name = read_name();
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '>') fail("expected '>' in end tag");
    ++pos_;
    if (open_.empty() || open_.back() != name)
      fail("mismatched end tag </" + name + ">");
    open_.pop_back();
    if (cb_.end_element) cb_.end_element(name);
  }

  void read_start_tag() {
    ++pos_;  // consume '<'
    std::string name = read_name();
    std::vector<Attribute> attrs;
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated start tag");
      if (s_[pos_] == '>') {
        ++pos_;
        open_.push_back(name);
        if (cb_.start_element) cb_.start_element(name, attrs);
        return;
      }
      if (s_[pos_] == '/') {
        ++pos_;
        if (pos_ >= s_.size() || s_[pos_] != '>') fail("expected '/>'");
        ++pos_;
        if (cb_.start_element) cb_.start_element(name, attrs);
        if (cb_.end_element) cb_.end_element(name);
        return;
      }
      Attribute a;
      a.name = read_name();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
        fail("expected quoted attribute value");
      char quote = s_[pos_++];
      std::size_t vstart = pos_;
      while (pos_ < s_.size() && s_[pos_] != quote) {
        if (s_[pos_] == '<') fail("'<' in attribute value");
        ++pos_;
      }
      if (pos_ >= s_.size()) fail("unterminated attribute value");
      a.value = decode_entities(s_.substr(vstart, pos_ - vstart));
      ++pos_;
      attrs.push_back(std::move(a));
    }
  }

  std::string_view s_;
  const Callbacks& cb_;
  std::size_t pos_ = 0;
  std::vector<std::string> open_;
};

}  // namespace

void parse(std::string_view input, const Callbacks& cb) {
  Cursor(input, cb).run();
}

}  // namespace aetas::xml

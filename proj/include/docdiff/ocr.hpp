#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "docdiff/error.hpp"
#include "docdiff/textpoint.hpp"

namespace docdiff {

struct OcrEngineConfig {
    std::string executable = "tesseract";
    std::string language = "fra";
    std::vector<std::string> extra_args;
    double timeout = 30.0;  // seconds
};

inline void validate(const OcrEngineConfig& cfg) {
    if (cfg.timeout <= 0.0) throw std::invalid_argument("OCR timeout must be > 0");
}

namespace detail {

inline std::string decode_entities(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        const auto semi = in.find(';', i + 1);
        if (semi == std::string::npos || semi - i > 12) {
            out.push_back(in[i++]);
            continue;
        }
        const std::string name = in.substr(i + 1, semi - i - 1);
        if (name == "amp")
            out.push_back('&');
        else if (name == "lt")
            out.push_back('<');
        else if (name == "gt")
            out.push_back('>');
        else if (name == "quot")
            out.push_back('"');
        else if (name == "apos")
            out.push_back('\'');
        else if (name == "nbsp")
            out.push_back(' ');
        else if (name.size() > 1 && name[0] == '#') {
            char32_t cp = 0;
            try {
                cp = (name[1] == 'x' || name[1] == 'X')
                         ? static_cast<char32_t>(std::stoul(name.substr(2), nullptr, 16))
                         : static_cast<char32_t>(std::stoul(name.substr(1), nullptr, 10));
            } catch (const std::exception&) {
                out.append(in, i, semi - i + 1);
                i = semi + 1;
                continue;
            }
            append_utf8(out, cp);
        } else {
            out.append(in, i, semi - i + 1);  // unknown entity kept verbatim
            i = semi + 1;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

inline std::string collapse_ws(const std::string& s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty()) pending = true;
        } else {
            if (pending) out.push_back(' ');
            pending = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool class_contains(const std::string& class_attr, const std::string& name) {
    std::istringstream ss(class_attr);
    std::string tok;
    while (ss >> tok)
        if (tok == name) return true;
    return false;
}

inline std::optional<Box> parse_title_bbox(const std::string& title) {
    std::istringstream ss(title);
    std::string field;
    while (std::getline(ss, field, ';')) {
        std::istringstream fs(field);
        std::string key;
        fs >> key;
        if (key != "bbox") continue;
        long x0, y0, x1, y1;
        if (!(fs >> x0 >> y0 >> x1 >> y1)) return std::nullopt;
        if (x1 <= x0 || y1 <= y0) return std::nullopt;
        return Box{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0),
                   static_cast<int>(y1 - y0)};
    }
    return std::nullopt;
}

inline double parse_title_wconf(const std::string& title) {
    std::istringstream ss(title);
    std::string field;
    while (std::getline(ss, field, ';')) {
        std::istringstream fs(field);
        std::string key;
        fs >> key;
        if (key != "x_wconf") continue;
        double v = 0.0;
        if (fs >> v) return std::clamp(v / 100.0, 0.0, 1.0);
    }
    return 0.0;
}

struct HocrTag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::string class_attr;
    std::string title_attr;
};

class HocrScanner {
public:
    explicit HocrScanner(const std::string& text) : text_(text) {}

    /// Returns false at end of input. Text content between tags is appended
    /// to `text_out`; a parsed tag is placed in `tag_out`.
    bool next(HocrTag& tag_out, std::string& text_out) {
        while (pos_ < text_.size()) {
            const auto lt = text_.find('<', pos_);
            if (lt == std::string::npos) {
                text_out += text_.substr(pos_);
                pos_ = text_.size();
                return false;
            }
            text_out += text_.substr(pos_, lt - pos_);
            pos_ = lt + 1;
            if (pos_ >= text_.size()) throw MalformedHocrError("dangling '<' at end of input");
            const char c = text_[pos_];
            if (c == '!' || c == '?') {
                skip_declaration();
                continue;
            }
            parse_tag(tag_out);
            return true;
        }
        return false;
    }

private:
    void skip_declaration() {
        if (text_.compare(pos_, 3, "!--") == 0) {
            const auto end = text_.find("-->", pos_ + 3);
            if (end == std::string::npos) throw MalformedHocrError("unterminated comment");
            pos_ = end + 3;
            return;
        }
        const auto end = text_.find('>', pos_);
        if (end == std::string::npos) throw MalformedHocrError("unterminated declaration");
        pos_ = end + 1;
    }

    void parse_tag(HocrTag& tag) {
        tag = HocrTag{};
        if (text_[pos_] == '/') {
            tag.closing = true;
            ++pos_;
        }
        const std::size_t name_start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '>' && text_[pos_] != '/')
            ++pos_;
        tag.name = text_.substr(name_start, pos_ - name_start);
        std::transform(tag.name.begin(), tag.name.end(), tag.name.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (tag.name.empty()) throw MalformedHocrError("tag without a name");

        while (true) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ >= text_.size()) throw MalformedHocrError("unterminated tag <" + tag.name);
            if (text_[pos_] == '>') {
                ++pos_;
                return;
            }
            if (text_[pos_] == '/') {
                ++pos_;
                if (pos_ >= text_.size() || text_[pos_] != '>')
                    throw MalformedHocrError("bad self-closing tag <" + tag.name);
                ++pos_;
                tag.self_closing = true;
                return;
            }
            // attribute
            const std::size_t attr_start = pos_;
            while (pos_ < text_.size() && text_[pos_] != '=' && text_[pos_] != '>' &&
                   text_[pos_] != '/' && !std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            std::string attr_name = text_.substr(attr_start, pos_ - attr_start);
            std::transform(attr_name.begin(), attr_name.end(), attr_name.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            std::string value;
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') {
                ++pos_;
                while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
                if (pos_ >= text_.size()) throw MalformedHocrError("attribute without value");
                if (text_[pos_] == '"' || text_[pos_] == '\'') {
                    const char quote = text_[pos_++];
                    const auto end = text_.find(quote, pos_);
                    if (end == std::string::npos)
                        throw MalformedHocrError("unterminated attribute value in <" + tag.name);
                    value = text_.substr(pos_, end - pos_);
                    pos_ = end + 1;
                } else {
                    const std::size_t vstart = pos_;
                    while (pos_ < text_.size() && text_[pos_] != '>' &&
                           !std::isspace(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                    value = text_.substr(vstart, pos_ - vstart);
                }
            }
            if (attr_name == "class") tag.class_attr = decode_entities(value);
            if (attr_name == "title") tag.title_attr = decode_entities(value);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Extract lines and words (with boxes and confidences) from hOCR markup.
inline DocumentText parse_hocr(const std::string& hocr) {
    DocumentText doc;
    std::optional<Box> page_box;

    struct OpenElement {
        std::string name;
        bool is_line = false;
        bool is_word = false;
    };
    std::vector<OpenElement> stack;
    std::optional<TextLine> line;
    std::optional<Box> line_bbox;
    std::string word_text;
    std::string word_title;
    bool in_word = false;
    int open_words = 0;
    int open_lines = 0;

    const auto finish_word = [&]() {
        const std::string raw = detail::collapse_ws(detail::decode_entities(word_text));
        word_text.clear();
        in_word = false;
        if (raw.empty()) return;
        const auto bbox = detail::parse_title_bbox(word_title);
        if (!bbox) throw MissingBboxError("word '" + raw + "'");
        TextPoint tp(raw, *bbox, detail::parse_title_wconf(word_title));
        if (line)
            line->words.push_back(std::move(tp));
        else  // orphan word outside any line: give it its own line
            doc.lines.push_back(TextLine{*bbox, {std::move(tp)}});
    };
    const auto finish_line = [&]() {
        if (line && !line->words.empty()) {
            Box box = line_bbox.value_or(Box{});
            if (box.empty()) {
                for (const auto& w : line->words) box = union_box(box, w.box);
            }
            line->line_box = box;
            doc.lines.push_back(std::move(*line));
        }
        line.reset();
        line_bbox.reset();
    };

    detail::HocrScanner scanner(hocr);
    detail::HocrTag tag;
    std::string text;
    for (;;) {
        text.clear();
        const bool have_tag = scanner.next(tag, text);
        if (in_word) word_text += text;
        if (!have_tag) break;

        if (!tag.closing) {
            const bool is_word = detail::class_contains(tag.class_attr, "ocrx_word");
            const bool is_line = detail::class_contains(tag.class_attr, "ocr_line");
            const bool is_page = detail::class_contains(tag.class_attr, "ocr_page");
            if (tag.self_closing) continue;  // cannot carry text content
            if (is_page && !page_box) page_box = detail::parse_title_bbox(tag.title_attr);
            if (is_word) {
                if (in_word) throw MalformedHocrError("nested ocrx_word elements");
                in_word = true;
                ++open_words;
                word_text.clear();
                word_title = tag.title_attr;
            } else if (is_line) {
                if (line) finish_line();
                ++open_lines;
                line = TextLine{};
                line_bbox = detail::parse_title_bbox(tag.title_attr);
            }
            stack.push_back(OpenElement{tag.name, is_line && !is_word, is_word});
        } else {
            // pop to the innermost element with this tag name (tag-soup tolerant)
            int found = -1;
            for (int i = static_cast<int>(stack.size()) - 1; i >= 0; --i) {
                if (stack[static_cast<std::size_t>(i)].name == tag.name) {
                    found = i;
                    break;
                }
            }
            if (found < 0) continue;  // stray closing tag
            for (int i = static_cast<int>(stack.size()) - 1; i >= found; --i) {
                const auto& el = stack[static_cast<std::size_t>(i)];
                if (el.is_word) {
                    finish_word();
                    --open_words;
                }
                if (el.is_line) {
                    finish_line();
                    --open_lines;
                }
            }
            stack.resize(static_cast<std::size_t>(found));
        }
    }
    if (open_words > 0 || in_word) throw MalformedHocrError("unclosed ocrx_word at end of input");
    if (open_lines > 0 && line) finish_line();

    int max_r = 0;
    int max_b = 0;
    for (const auto& l : doc.lines) {
        for (const auto& w : l.words) {
            max_r = std::max(max_r, w.box.right());
            max_b = std::max(max_b, w.box.bottom());
        }
    }
    doc.page_width = std::max(page_box ? page_box->w : 0, max_r);
    doc.page_height = std::max(page_box ? page_box->h : 0, max_b);
    return doc;
}

namespace detail {

inline bool executable_exists(const std::string& exe) {
    if (exe.find('/') != std::string::npos) return ::access(exe.c_str(), X_OK) == 0;
    const char* path_env = std::getenv("PATH");
    if (!path_env) return false;
    std::istringstream ss(path_env);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        if (::access((dir + "/" + exe).c_str(), X_OK) == 0) return true;
    }
    return false;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Run the external OCR engine on one image and return its hOCR output.
/// Command contract: `<executable> <image> <outbase> -l <language> [extra] hocr`.
inline std::string run_ocr(const std::string& image_path, const OcrEngineConfig& cfg) {
    validate(cfg);
    if (::access(image_path.c_str(), R_OK) != 0) throw FileNotFoundError(image_path);
    if (!detail::executable_exists(cfg.executable)) throw EngineNotFoundError(cfg.executable);

    namespace fs = std::filesystem;
    std::string tmpl = (fs::temp_directory_path() / "docdiff-ocr-XXXXXX").string();
    std::vector<char> tmpl_buf(tmpl.begin(), tmpl.end());
    tmpl_buf.push_back('\0');
    if (!::mkdtemp(tmpl_buf.data())) throw Error("cannot create temp directory for OCR output");
    const std::string tmpdir(tmpl_buf.data());
    const std::string outbase = tmpdir + "/out";
    struct TmpGuard {
        std::string dir;
        ~TmpGuard() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } guard{tmpdir};

    std::vector<std::string> args = {cfg.executable, image_path, outbase};
    if (!cfg.language.empty()) {
        args.push_back("-l");
        args.push_back(cfg.language);
    }
    args.insert(args.end(), cfg.extra_args.begin(), cfg.extra_args.end());
    args.emplace_back("hocr");

    int err_pipe[2];
    if (::pipe(err_pipe) != 0) throw Error("pipe() failed");

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(err_pipe[0]);
        ::close(err_pipe[1]);
        throw Error("fork() failed");
    }
    if (pid == 0) {
        ::close(err_pipe[0]);
        ::dup2(err_pipe[1], 2);
        ::close(err_pipe[1]);
        const int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, 1);
        std::vector<char*> argv;
        argv.reserve(args.size() + 1);
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }

    ::close(err_pipe[1]);
    ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);
    std::string stderr_text;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg.timeout));
    int status = 0;
    bool exited = false;
    for (;;) {
        char buf[4096];
        ssize_t n;
        while ((n = ::read(err_pipe[0], buf, sizeof(buf))) > 0) stderr_text.append(buf, static_cast<std::size_t>(n));
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            exited = true;
            break;
        }
        if (std::chrono::steady_clock::now() >= deadline) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (!exited) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        ::close(err_pipe[0]);
        throw TimeoutError("OCR engine exceeded " + std::to_string(cfg.timeout) + " s");
    }
    char buf[4096];
    ssize_t n;
    while ((n = ::read(err_pipe[0], buf, sizeof(buf))) > 0) stderr_text.append(buf, static_cast<std::size_t>(n));
    ::close(err_pipe[0]);

    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        if (WIFEXITED(status) && WEXITSTATUS(status) == 127) throw EngineNotFoundError(cfg.executable);
        if (stderr_text.size() > 500) stderr_text.resize(500);
        throw EngineFailedError("exit status " +
                                std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) +
                                (stderr_text.empty() ? "" : ": " + stderr_text));
    }
    const std::string hocr_path = outbase + ".hocr";
    if (::access(hocr_path.c_str(), R_OK) != 0)
        throw EngineFailedError("engine produced no hOCR output at " + hocr_path);
    return detail::read_text_file(hocr_path);
}

/// Obtain a page's text: parse the override file when given, otherwise run
/// the engine. The override keeps tests hermetic.
inline DocumentText load_document_text(const std::string& image_path, const OcrEngineConfig& cfg,
                                       const std::optional<std::string>& hocr_override = std::nullopt) {
    if (hocr_override) return parse_hocr(detail::read_text_file(*hocr_override));
    return parse_hocr(run_ocr(image_path, cfg));
}

}  // namespace docdiff

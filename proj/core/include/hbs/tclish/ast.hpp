#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace hbs::tclish {

struct ScriptNode;
using Script = std::vector<ScriptNode>;

struct Literal {
  std::string text;
};

/// `$name` or `${name}`; name may be `::`-qualified.
struct VarRef {
  std::string name;
};

/// `[script]`; `raw` keeps the bracket contents verbatim.
struct CmdSub {
  std::shared_ptr<const Script> script;
  std::string raw;
};

/// `{...}` contents, never substituted at parse time.
struct Braced {
  std::string text;
};

using Part = std::variant<Literal, VarRef, CmdSub, Braced>;

struct Word {
  enum class Form { bare, quoted, braced };
  Form form = Form::bare;
  std::vector<Part> parts;
  int line = 0;
};

/// One parsed command. `doc` holds the comment block directly above it.
struct ScriptNode {
  std::vector<Word> words;
  int line = 0;
  std::string doc;
  std::string source;
};

}  // namespace hbs::tclish

#include "hintlab/prompts/templates.hpp"

#include <fstream>
#include <sstream>

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"
#include "json.hpp"

namespace hintlab::prompts {

namespace {

PromptTemplate parse_template_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open prompt template: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  const std::string sys_marker = "[system]\n";
  const std::string user_marker = "\n[user]\n";
  size_t sys_pos = text.find(sys_marker);
  size_t user_pos = text.find(user_marker);
  if (sys_pos != 0 || user_pos == std::string::npos) {
    throw ConfigError("template " + path +
                      ": expected '[system]' then '[user]' sections");
  }
  PromptTemplate t;
  t.system_text = trim(text.substr(sys_marker.size(), user_pos - sys_marker.size()));
  // Trim only trailing whitespace from the user body so templates keep their
  // internal blank lines but do not end with a stray newline.
  std::string user = text.substr(user_pos + user_marker.size());
  while (!user.empty() && (user.back() == '\n' || user.back() == ' ' ||
                           user.back() == '\r' || user.back() == '\t')) {
    user.pop_back();
  }
  t.user_text = user;
  if (t.system_text.empty() || t.user_text.empty()) {
    throw ConfigError("template " + path + ": empty system or user section");
  }
  return t;
}

// Substitutes {name} from values; {{ and }} are literal braces. Unknown
// placeholder names or unbalanced braces are asset bugs, reported as
// ConfigError so they surface before any model call.
std::string substitute(const std::string& text,
                       const std::map<std::string, std::string>& values,
                       const std::string& where) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        out.push_back('{');
        ++i;
        continue;
      }
      size_t end = text.find('}', i + 1);
      if (end == std::string::npos) {
        throw ConfigError(where + ": unterminated placeholder");
      }
      std::string name = text.substr(i + 1, end - i - 1);
      auto it = values.find(name);
      if (it == values.end()) {
        throw ConfigError(where + ": template references unknown placeholder {" +
                          name + "}");
      }
      out.append(it->second);
      i = end;
    } else if (c == '}') {
      if (i + 1 < text.size() && text[i + 1] == '}') {
        out.push_back('}');
        ++i;
        continue;
      }
      throw ConfigError(where + ": stray '}' outside placeholder");
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string joined_answers(const core::Exercise& ex) {
  return join(ex.accepted_answers, "; ");
}

std::string serialize_examples(const std::vector<DiversifyExample>& examples) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : examples) {
    arr.push_back({{"gpt_initial_reasoning", e.reasoning},
                   {"initial_response", e.response},
                   {"evaluation", e.evaluation}});
  }
  return arr.dump();
}

}  // namespace

TemplateSet TemplateSet::load(const std::string& templates_dir,
                              const std::string& lang) {
  if (lang != "fr" && lang != "en") {
    throw ConfigError("unsupported template language: " + lang);
  }
  TemplateSet set;
  set.lang_ = lang;
  for (int i = 0; i < kPromptKindCount; ++i) {
    PromptKind k = static_cast<PromptKind>(i);
    std::string path =
        templates_dir + "/" + lang + "/" + prompt_kind_name(k) + ".txt";
    set.templates_[k] = parse_template_file(path);
  }
  return set;
}

const PromptTemplate& TemplateSet::get(PromptKind k) const {
  auto it = templates_.find(k);
  if (it == templates_.end()) {
    throw ConfigError("no template loaded for kind " + prompt_kind_name(k));
  }
  return it->second;
}

llm::MessageList render(PromptKind kind, const RenderInput& input,
                        const TemplateSet& templates) {
  const std::string where = "render(" + prompt_kind_name(kind) + ")";

  if (is_baseline_hint(kind) && input.attempt.has_value()) {
    throw ForbiddenField(where +
                         ": baseline hint prompts must not receive the "
                         "student's attempt");
  }

  auto need = [&](const char* what, bool ok) {
    if (!ok) throw MissingField(where + ": missing " + what);
  };

  std::map<std::string, std::string> values;
  values["exercise"] = input.exercise.statement;
  values["instruct"] = input.exercise.instruction;
  values["answer"] = joined_answers(input.exercise);
  values["demarche_cog"] = input.exercise.cognitive_approach;

  switch (kind) {
    case PromptKind::Solve:
      break;
    case PromptKind::Review:
      need("hint", input.hint.has_value());
      values["hint"] = *input.hint;
      break;
    case PromptKind::ClassifyHint:
      need("hint", input.hint.has_value());
      need("revised_answer", input.revised_answer.has_value());
      values["hint"] = *input.hint;
      values["revised_response"] = *input.revised_answer;
      break;
    case PromptKind::CheckAndDetect:
      need("attempt", input.attempt.has_value());
      values["student_answer"] = input.attempt->answer;
      values["reasoning"] = input.attempt->reasoning;
      break;
    case PromptKind::Diversify:
      need("examples", input.examples.has_value() && !input.examples->empty());
      need("k_examples", input.k_examples.has_value() && *input.k_examples > 0);
      values["list_reasoning"] = serialize_examples(*input.examples);
      values["k"] = std::to_string(*input.k_examples);
      break;
    case PromptKind::BaselineOne:
    case PromptKind::BaselineTwo:
      break;
    default:  // the seven specialized hint kinds
      need("attempt", input.attempt.has_value());
      values["gpt_reasoning"] = input.attempt->reasoning;
      values["gpt_response"] = input.attempt->answer;
      break;
  }

  const PromptTemplate& t = templates.get(kind);
  llm::MessageList messages;
  messages.push_back({llm::Role::System, substitute(t.system_text, values, where)});
  messages.push_back({llm::Role::User, substitute(t.user_text, values, where)});
  return messages;
}

}  // namespace hintlab::prompts

// Portuguese suffix stripping in the style of RSLP (Orengo & Huyck 2001).
// Rule tables here are mirrored in docs/stemmer_rules.md.

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kpcloud/preprocess.h"
#include "kpcloud/utf8.h"

namespace kpcloud {
namespace {

struct Rule {
  std::string suffix;
  std::size_t min_stem;  // code points that must remain after removal
  std::string replacement;
  std::unordered_set<std::string> exceptions;
};

using RuleList = std::vector<Rule>;

RuleList sorted(RuleList rules) {
  std::stable_sort(rules.begin(), rules.end(),
                   [](const Rule& a, const Rule& b) { return a.suffix.size() > b.suffix.size(); });
  return rules;
}

bool ends_with(std::string_view word, std::string_view suffix) {
  return word.size() >= suffix.size() && word.substr(word.size() - suffix.size()) == suffix;
}

// Applies the longest matching rule of a step. Returns true if it fired.
bool apply_step(std::string& word, const RuleList& rules) {
  for (const auto& rule : rules) {
    if (!ends_with(word, rule.suffix)) continue;
    const std::string_view stem_part(word.data(), word.size() - rule.suffix.size());
    if (utf8::length(stem_part) < rule.min_stem) continue;
    if (rule.exceptions.contains(word)) continue;
    word = std::string(stem_part) + rule.replacement;
    return true;
  }
  return false;
}

const RuleList& plural_rules() {
  static const RuleList rules = sorted({
      {"ns", 1, "m", {}},
      {"ões", 3, "ão", {}},
      {"ães", 1, "ão", {"mães"}},
      {"ais", 1, "al", {"cais", "mais"}},
      {"éis", 2, "el", {}},
      {"eis", 2, "el", {}},
      {"óis", 2, "ol", {}},
      {"is", 2, "il", {"lápis", "cais", "mais", "crúcis", "biquínis", "pois", "depois", "dois", "leis"}},
      {"les", 3, "l", {}},
      {"res", 3, "r", {"árvores"}},
      {"s", 2, "", {"aliás", "pires", "lápis", "cais", "mais", "mas", "menos", "férias", "fezes",
                    "pêsames", "crúcis", "gás", "atrás", "moisés", "através", "convés", "ês", "país",
                    "após", "ambas", "ambos", "messias", "depois"}},
  });
  return rules;
}

const RuleList& feminine_rules() {
  static const RuleList rules = sorted({
      {"ona", 3, "ão", {"abandona", "lona", "iona", "cortisona", "monótona", "maratona", "acetona", "detona", "carona"}},
      {"ora", 3, "or", {}},
      {"na", 4, "no", {"carona", "abandona", "lona", "iona", "cortisona", "monótona", "maratona", "acetona",
                       "detona", "guiana", "campana", "grana", "caravana", "banana", "paisana"}},
      {"inha", 3, "inho", {"rainha", "linha", "minha"}},
      {"esa", 3, "ês", {"mesa", "obesa", "princesa", "turquesa", "ilesa", "pesa", "presa"}},
      {"osa", 3, "oso", {"mucosa", "prosa"}},
      {"íaca", 3, "íaco", {}},
      {"ica", 3, "ico", {"dica"}},
      {"ada", 2, "ado", {"pitada"}},
      {"ida", 3, "ido", {"vida"}},
      {"ída", 3, "ido", {"recaída", "saída", "dúvida"}},
      {"ima", 3, "imo", {"vítima"}},
      {"iva", 3, "ivo", {"saliva", "oliva"}},
      {"eira", 3, "eiro", {"beira", "cadeira", "frigideira", "bandeira", "feira", "capoeira", "barreira",
                           "fronteira", "besteira", "poeira"}},
  });
  return rules;
}

const RuleList& adverb_rules() {
  static const RuleList rules = {{"mente", 4, "", {"experimente"}}};
  return rules;
}

const RuleList& augmentative_rules() {
  static const RuleList rules = sorted({
      {"díssimo", 5, "", {}},
      {"abilíssimo", 5, "", {}},
      {"íssimo", 3, "", {}},
      {"ésimo", 3, "", {}},
      {"érrimo", 4, "", {}},
      {"zinho", 2, "", {}},
      {"quinho", 4, "c", {}},
      {"uinho", 4, "", {}},
      {"adinho", 3, "", {}},
      {"inho", 3, "", {"caminho", "cominho"}},
      {"alhão", 4, "", {}},
      {"uça", 4, "", {}},
      {"aço", 4, "", {"antebraço"}},
      {"adão", 4, "", {}},
      {"ázio", 3, "", {"topázio"}},
      {"arraz", 4, "", {}},
      {"arra", 3, "", {}},
      {"zão", 2, "", {"coalizão"}},
  });
  return rules;
}

const RuleList& noun_rules() {
  static const RuleList rules = sorted({
      {"encialista", 4, "", {}},
      {"alista", 5, "", {}},
      {"agem", 3, "", {"coragem", "chantagem", "vantagem", "carruagem"}},
      {"iamento", 4, "", {}},
      {"amento", 3, "", {"firmamento", "fundamento", "departamento"}},
      {"imento", 3, "", {}},
      {"mento", 6, "", {"firmamento", "elemento", "complemento", "instrumento", "departamento"}},
      {"alizado", 4, "", {}},
      {"atizado", 4, "", {}},
      {"tizado", 4, "", {"alfabetizado"}},
      {"izado", 5, "", {"organizado", "pulverizado"}},
      {"ativo", 4, "", {"pejorativo", "relativo"}},
      {"tivo", 4, "", {"relativo"}},
      {"ivo", 4, "", {"passivo", "possessivo", "pejorativo", "positivo"}},
      {"ado", 2, "", {"grado"}},
      {"ido", 3, "", {"cândido", "consolido", "rápido", "decido", "tímido", "duvido", "marido"}},
      {"ador", 3, "", {}},
      {"edor", 3, "", {}},
      {"idor", 4, "", {"ouvidor"}},
      {"dor", 4, "", {"ouvidor"}},
      {"sor", 4, "", {"assessor"}},
      {"atoria", 5, "", {}},
      {"tor", 3, "", {"benfeitor", "leitor", "editor", "pastor", "produtor", "promotor", "consultor"}},
      {"or", 2, "", {"motor", "melhor", "redor", "rigor", "sensor", "tambor", "tumor", "assessor", "benfeitor",
                     "pastor", "terior", "favor", "autor"}},
      {"abilidade", 5, "", {}},
      {"icionista", 4, "", {}},
      {"cionista", 5, "", {}},
      {"ionista", 5, "", {}},
      {"ional", 4, "", {}},
      {"ência", 3, "", {}},
      {"ância", 4, "", {"ambulância"}},
      {"edouro", 3, "", {}},
      {"queiro", 3, "c", {}},
      {"adeiro", 4, "", {"desfiladeiro"}},
      {"eiro", 3, "", {"desfiladeiro", "pioneiro", "mosteiro"}},
      {"uoso", 3, "", {}},
      {"oso", 3, "", {"precioso"}},
      {"alização", 5, "", {}},
      {"atização", 5, "", {}},
      {"ização", 5, "", {"organização"}},
      {"ação", 3, "", {"equação", "relação"}},
      {"ição", 3, "", {"eleição"}},
      {"ução", 3, "", {}},
      {"ção", 3, "", {}},
      {"ário", 3, "", {"voluntário", "salário", "aniversário", "diário", "lionário", "armário"}},
      {"atório", 3, "", {}},
      {"ério", 6, "", {}},
      {"ês", 4, "", {}},
      {"eza", 3, "", {}},
      {"ez", 4, "", {}},
      {"esco", 4, "", {}},
      {"ante", 2, "", {"gigante", "elefante", "adiante", "possante", "instante", "restaurante"}},
      {"ástico", 4, "", {"eclesiástico"}},
      {"alístico", 3, "", {}},
      {"áutico", 4, "", {}},
      {"êutico", 4, "", {}},
      {"tico", 3, "", {"político", "eclesiástico", "diagnóstico", "prático", "doméstico", "idêntico",
                       "alopático", "artístico", "autêntico", "eclético", "crítico"}},
      {"ico", 4, "", {"tico", "público", "explico"}},
      {"ividade", 5, "", {}},
      {"idade", 4, "", {"autoridade", "comunidade"}},
      {"oria", 4, "", {"categoria"}},
      {"encial", 5, "", {}},
      {"ista", 4, "", {}},
      {"auta", 5, "", {}},
      {"quice", 4, "c", {}},
      {"ice", 4, "", {"cúmplice"}},
      {"íaco", 3, "", {}},
      {"ente", 4, "", {"alimente", "acrescente", "permanente", "oriente", "aparente"}},
      {"ense", 5, "", {}},
      {"inal", 3, "", {}},
      {"ano", 4, "", {}},
      {"ável", 2, "", {"afável", "razoável", "potável", "vulnerável"}},
      {"ível", 3, "", {"possível"}},
      {"vel", 5, "", {"possível", "vulnerável", "solúvel"}},
      {"bil", 3, "vel", {}},
      {"ura", 4, "", {"imatura", "acupuntura", "costura"}},
      {"ural", 4, "", {}},
      {"ual", 3, "", {"bissexual", "virtual", "visual", "pontual"}},
      {"ial", 3, "", {}},
      {"al", 4, "", {"afinal", "animal", "estatal", "bissexual", "desleal", "fiscal", "formal", "pessoal",
                     "liberal", "postal", "virtual", "visual", "pontual", "sideral", "sucursal"}},
      {"alismo", 4, "", {}},
      {"ivismo", 4, "", {}},
      {"ismo", 3, "", {"cinismo"}},
  });
  return rules;
}

// Final `s` was already removed by the plural step, hence "-amo" not "-amos".
const RuleList& verb_rules() {
  static const RuleList rules = sorted({
      {"aríamo", 2, "", {}}, {"ássemo", 2, "", {}}, {"eríamo", 2, "", {}}, {"êssemo", 2, "", {}},
      {"iríamo", 3, "", {}}, {"íssemo", 3, "", {}}, {"áramo", 2, "", {}},  {"árei", 2, "", {}},
      {"aremo", 2, "", {}},  {"ariam", 2, "", {}},  {"aríei", 2, "", {}},  {"ássei", 2, "", {}},
      {"assem", 2, "", {}},  {"ávamo", 2, "", {}},  {"êramo", 3, "", {}},  {"eremo", 3, "", {}},
      {"eriam", 3, "", {}},  {"eríei", 3, "", {}},  {"êssei", 3, "", {}},  {"essem", 3, "", {}},
      {"íramo", 3, "", {}},  {"iremo", 3, "", {}},  {"iriam", 3, "", {}},  {"iríei", 3, "", {}},
      {"íssei", 3, "", {}},  {"issem", 3, "", {}},  {"ando", 2, "", {}},   {"endo", 3, "", {}},
      {"indo", 3, "", {}},   {"ondo", 3, "", {}},   {"aram", 2, "", {}},   {"arão", 2, "", {}},
      {"arde", 2, "", {}},   {"arei", 2, "", {}},   {"arem", 2, "", {}},   {"aria", 2, "", {}},
      {"armo", 2, "", {}},   {"asse", 2, "", {}},   {"aste", 2, "", {}},   {"avam", 2, "", {"agravam"}},
      {"ávei", 2, "", {}},   {"eram", 3, "", {}},   {"erão", 3, "", {}},   {"erde", 3, "", {}},
      {"erei", 3, "", {}},   {"êrei", 3, "", {}},   {"erem", 3, "", {}},   {"eria", 3, "", {}},
      {"ermo", 3, "", {}},   {"esse", 3, "", {}},   {"este", 3, "", {"faroeste", "agreste"}},
      {"íamo", 3, "", {}},   {"iram", 3, "", {}},   {"íram", 3, "", {}},   {"irão", 2, "", {}},
      {"irde", 2, "", {}},   {"irei", 3, "", {"admirei"}}, {"irem", 3, "", {"adquirem"}},
      {"iria", 3, "", {}},   {"irmo", 3, "", {}},   {"isse", 3, "", {}},   {"iste", 4, "", {}},
      {"iava", 4, "", {"ampliava"}}, {"amo", 2, "", {}}, {"iona", 3, "", {}},
      {"ara", 2, "", {"arara", "prepara"}}, {"ará", 2, "", {"alvará"}}, {"are", 2, "", {"prepare"}},
      {"ava", 2, "", {"agrava"}}, {"emo", 2, "", {}}, {"era", 3, "", {"acelera", "espera"}},
      {"erá", 3, "", {}},    {"ere", 3, "", {"espere"}},
      {"iam", 3, "", {"enfiam", "ampliam", "elogiam", "ensaiam"}}, {"íei", 3, "", {}},
      {"imo", 3, "", {"reprimo", "intimo", "íntimo", "nimo", "queimo", "ximo"}},
      {"ira", 3, "", {"fronteira", "sátira"}}, {"ído", 3, "", {}}, {"irá", 3, "", {}},
      {"tizar", 4, "", {"alfabetizar"}}, {"izar", 5, "", {"organizar"}},
      {"itar", 5, "", {"acreditar", "explicitar", "estreitar"}}, {"ire", 3, "", {"adquire"}},
      {"ai", 2, "", {}},     {"am", 2, "", {}},     {"ear", 4, "", {"alardear", "nuclear"}},
      {"ar", 2, "", {"azar", "bazaar", "patamar"}}, {"uei", 3, "", {}}, {"uía", 5, "u", {}},
      {"ei", 3, "", {}},     {"guem", 3, "g", {}},  {"em", 2, "", {"alem", "virgem"}},
      {"er", 2, "", {"éter", "pier"}}, {"eu", 3, "", {"chapeu"}},
      {"ia", 3, "", {"estória", "fatia", "acia", "praia", "elogia", "mania", "lábia", "aprecia", "polícia",
                     "arredia", "cheia", "ásia"}},
      {"ir", 3, "", {"freir"}}, {"iu", 3, "", {}}, {"eou", 5, "", {}}, {"ou", 3, "", {}}, {"i", 3, "", {}},
  });
  return rules;
}

const RuleList& vowel_rules() {
  static const RuleList rules = sorted({
      {"bil", 2, "vel", {}},
      {"gue", 2, "g", {"gangue", "jegue"}},
      {"á", 3, "", {}},
      {"ê", 3, "", {"bebê"}},
      {"a", 3, "", {"ásia"}},
      {"e", 3, "", {}},
      {"o", 3, "", {"ão"}},
  });
  return rules;
}

class PortugueseStemmer final : public Stemmer {
 public:
  std::string_view name() const override { return "rslp-pt"; }

  std::string apply_rules(std::string_view folded) const override {
    std::string word(folded);
    if (word.empty()) return word;
    if (word.back() == 's') apply_step(word, plural_rules());
    if (!word.empty() && word.back() == 'a') apply_step(word, feminine_rules());
    apply_step(word, adverb_rules());
    apply_step(word, augmentative_rules());
    if (!apply_step(word, noun_rules())) {
      if (!apply_step(word, verb_rules())) apply_step(word, vowel_rules());
    }
    return utf8::strip_accents(word);
  }
};

}  // namespace

std::shared_ptr<const Stemmer> make_portuguese_stemmer() {
  static const auto instance = std::make_shared<PortugueseStemmer>();
  return instance;
}

}  // namespace kpcloud

use std::collections::HashMap;
use std::sync::Arc;

use super::{extract_context, llm_extract, Extraction, ExtractorService, KnowledgeBase, VerbalInput};

/// Backend selection plus a per-owner memo of grammar results (the grammar is
/// deterministic, so repeated scripted messages are parsed once).
pub struct ContextExtractor {
    kb: Arc<KnowledgeBase>,
    service: Option<Arc<dyn ExtractorService + Send + Sync>>,
    memo: HashMap<String, Extraction>,
}

impl ContextExtractor {
    pub fn grammar(kb: Arc<KnowledgeBase>) -> Self {
        Self { kb, service: None, memo: HashMap::new() }
    }

    pub fn with_service(kb: Arc<KnowledgeBase>, service: Arc<dyn ExtractorService + Send + Sync>) -> Self {
        Self { kb, service: Some(service), memo: HashMap::new() }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn extract(&mut self, input: &VerbalInput) -> Extraction {
        match &self.service {
            Some(svc) => llm_extract(input, &self.kb, svc.as_ref()),
            None => {
                if let Some(hit) = self.memo.get(&input.text) {
                    return hit.clone();
                }
                let ex = extract_context(input, &self.kb);
                self.memo.insert(input.text.clone(), ex.clone());
                ex
            }
        }
    }
}
